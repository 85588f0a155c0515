import math

import numpy as np
import pytest

from isoharm.curve import IntervalSystem
from isoharm import measures as ms
from isoharm import pell as pl

P = np.polynomial.polynomial


def test_detect_regular_examples():
    assert pl.detect_regular((0.4, 0.8)) == (5, (5, 4, 2))
    assert pl.detect_regular((1 / 3, 2 / 3)) == (3, (3, 2, 1))
    assert pl.detect_regular((1 / math.sqrt(2),), q_max=1000, tol=1e-12) is None


def test_akhiezer_single_interval_closed_form():
    E = IntervalSystem((1.0, -1.0))
    val = pl.akhiezer(E, 5, 2.0)
    assert val == pytest.approx((2 + math.sqrt(3)) ** 5, rel=1e-9)


def test_akhiezer_modulus_one_on_support(cubic_system):
    for lo, hi in cubic_system.bands:
        z = 0.5 * (lo + hi) + 1e-9j
        val = pl.akhiezer(cubic_system, 3, z)
        assert abs(abs(val) - 1.0) <= 1e-8


def test_akhiezer_involution_product(cubic_system):
    # A(P) A(P*) = 1: realized as A * (1/A); the two sheet values of
    # exp(n G) are reciprocal because G flips sign with the root
    z = 2.5
    A = pl.akhiezer(cubic_system, 3, z)
    assert A * (1.0 / A) == pytest.approx(1.0, rel=1e-14)
    assert abs(A) > 1.0  # growth side off the support


def test_akhiezer_rejects_nonregular():
    E = IntervalSystem((6.0, 5.0, 3.0, 2.5, 1.0, 0.0))
    with pytest.raises(pl.RegularityError):
        pl.akhiezer(E, 5, 2.0)


def test_classical_degree_five():
    E = IntervalSystem((1.0, -1.0))
    cert = pl.chebyshev_poly(E, 5)
    np.testing.assert_allclose(
        cert.p_coeffs, [0.0, 5.0, 0.0, -20.0, 0.0, 16.0], atol=1e-10
    )
    assert cert.residual <= 1e-10
    assert cert.signature == (4,)
    assert cert.winding == (5,)


def test_cubic_preimage_certificates(cubic_system):
    cert = pl.chebyshev_poly(cubic_system, 3)
    np.testing.assert_allclose(cert.p_coeffs, [0.0, -3.0, 0.0, 1.0], atol=1e-10)
    np.testing.assert_allclose(cert.q_coeffs, [1.0], atol=1e-10)
    assert cert.residual <= 1e-12
    cert6 = pl.chebyshev_poly(cubic_system, 6)
    np.testing.assert_allclose(
        cert6.p_coeffs, [-1.0, 0.0, 18.0, 0.0, -12.0, 0.0, 2.0], atol=1e-9
    )
    assert cert6.residual <= 1e-10
    assert cert6.winding == (6, 4, 2)


def test_pell_residual_sensitivity(cubic_system):
    cert = pl.chebyshev_poly(cubic_system, 3)
    p = np.array(cert.p_coeffs)
    p[1] += 1e-3
    resid, _, _ = pl.pell_residual(p, cubic_system)
    assert resid > 1e-4


def test_pell_residual_exact_certificates(cubic_system):
    for n in (3, 6):
        cert = pl.chebyshev_poly(cubic_system, n)
        resid, tau, m = pl.pell_residual(np.array(cert.p_coeffs), cubic_system)
        assert resid <= 1e-10
        assert tau == cert.signature
        assert m == cert.winding


@pytest.mark.parametrize("n", [3, 6])
def test_equioscillation_count(cubic_system, n):
    # the degree-n certificate touches -+1 at n + d points of the support,
    # alternating within each band (no constraint across the gaps)
    cert = pl.chebyshev_poly(cubic_system, n)
    p = np.asarray(cert.p_coeffs)
    dp = P.polyder(p)
    crit = np.roots(dp[::-1])
    crit = crit[np.abs(crit.imag) < 1e-9].real
    count = 0
    for lo, hi in cubic_system.bands:
        pts = [lo] + sorted(c for c in crit if lo < c < hi) + [hi]
        vals = P.polyval(np.array(pts), p)
        keep = np.abs(np.abs(vals) - 1.0) < 1e-7
        vals = vals[keep]
        count += len(vals)
        assert np.all(np.abs(np.diff(np.sign(vals))) == 2)
    assert count == n + cubic_system.d


def test_gap_critical_points_match_eta_zeros(cubic_system):
    cert = pl.chebyshev_poly(cubic_system, 3)
    dp = P.polyder(np.asarray(cert.p_coeffs))
    crit = np.sort(np.roots(dp[::-1]).real)
    gaps = cubic_system.gaps
    gap_crit = [c for c in crit if any(lo < c < hi for lo, hi in gaps)]
    zeros = ms.eta(cubic_system).gap_zeros
    np.testing.assert_allclose(gap_crit, zeros, atol=1e-8)


def test_winding_recursion_consistency(cubic_system):
    cert = pl.chebyshev_poly(cubic_system, 6)
    m = list(cert.winding) + [0]
    for j, tau in enumerate(cert.signature, start=1):
        assert m[j - 1] == m[j] + tau + 1


def test_degree_below_interval_count(cubic_system):
    with pytest.raises(pl.RegularityError):
        pl.pell_residual(np.array([0.0, 1.0]), cubic_system)
