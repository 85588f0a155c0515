import math

import mpmath
import numpy as np
import pytest

from isoharm.curve import BranchModel, IntervalSystem, PoleOnContourError, phi_q0
from isoharm import deform as df
from isoharm import measures as ms
from isoharm import periods as pr


def agm_K(k):
    a, b = 1.0, math.sqrt(1.0 - k * k)
    for _ in range(64):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2 * a)


def test_singular_integral_arcsine():
    val = pr.singular_integral(None, lambda z: 1.0 / np.sqrt((1 - z) * (1 + z)), (-1.0, 1.0))
    assert val == pytest.approx(math.pi, abs=1e-13)


def test_singular_integral_odd_vanishes():
    val = pr.singular_integral(None, lambda z: z / np.sqrt((1 - z) * (1 + z)), (-1.0, 1.0))
    assert abs(val) <= 1e-13


def test_singular_integral_pole_error(cfg_g2):
    rep = pr.DifferentialRep((1.0,), 2.5, cfg_g2)
    with pytest.raises(PoleOnContourError):
        pr.singular_integral(cfg_g2, rep, (2.0, 3.0))


def test_gap_integral_against_tanh_sinh_oracle(cfg_g2):
    # phi over the gap [1, x_1]: tanh-sinh oracle in exact mpmath arithmetic.
    # On this gap the upper-edge root is -i |root|, so the package value
    # should equal +i times the positive real oracle.
    rep = pr.DifferentialRep((1.0,), None, cfg_g2)
    mine = pr.singular_integral(cfg_g2, rep, (1.0, 2.0))

    def f_abs(t):
        return 1 / mpmath.sqrt(t * (t - 1) * (2 - t) * (3 - t) * (5 - t))

    with mpmath.workdps(30):
        oracle = mpmath.quad(f_abs, [1.0, 2.0])
    assert abs(mine - 1j * float(oracle)) <= 1e-10 * float(oracle)


def test_ellipse_and_segment_cycles_agree(cfg_g2):
    mdl = cfg_g2.model()
    plane = pr.DifferentialRep((0.3, 1.0), None, cfg_g2).plane
    for j in range(2):
        seg = pr.gap_cycle_period(plane, mdl, j, 256)
        lo, hi = mdl.gaps[j]
        others = [p for p in mdl.branch_points if p not in (lo, hi)]
        ell = pr._ellipse_cycle(
            lambda z: plane(z) * mdl.sqrt(z), mdl, lo, hi, others, True, 512
        )
        assert ell == pytest.approx(seg, rel=1e-11)


def test_g1_agm_oracle():
    for x in (0.2, 0.37, 0.81):
        model = BranchModel((0.0, x, 1.0), ((0.0, x), (1.0, math.inf)))
        plane = lambda z: 1.0 / model.sqrt(z)
        B = pr.band_chain_period(plane, model, 0, 512) / pr.gap_cycle_period(
            plane, model, 0, 512
        )
        oracle = 1j * agm_K(math.sqrt(x)) / agm_K(math.sqrt(1 - x))
        assert abs(B - oracle) <= 1e-10 * abs(oracle)


def test_normalized_basis_identity(cfg_g3):
    omegas, _ = pr.normalized_basis(cfg_g3, 256)
    mdl = cfg_g3.model()
    for j in range(cfg_g3.g):
        for k, om in enumerate(omegas):
            per = pr.gap_cycle_period(om.plane, mdl, j, 256)
            assert per == pytest.approx(1.0 if j == k else 0.0, abs=1e-10)


def test_basis_numerators_polynomial(cfg_g2):
    omegas, _ = pr.normalized_basis(cfg_g2, 256)
    for om in omegas:
        assert om.pole is None
        assert om.degree() <= cfg_g2.g - 1


def test_riemann_matrix_properties(cfg_g3):
    B = pr.riemann_matrix(cfg_g3, 256)
    assert np.abs(B - B.T).max() <= 1e-9
    np.linalg.cholesky(B.imag)  # positive definite or raises


def test_node_doubling_gate(cfg_g2):
    B1 = pr.riemann_matrix(cfg_g2, 256)
    B2 = pr.riemann_matrix(cfg_g2, 512)
    assert np.abs(B1 - B2).max() <= 1e-11


def test_v_basis_evaluation_matrix(cfg_g3):
    vs = pr.v_basis(cfg_g3)
    pts = cfg_g3.branch_points
    g = cfg_g3.g
    M = np.zeros((g, g), dtype=complex)
    where = [("branch", pts.index(u)) for u in cfg_g3.u] + [("regular", cfg_g3.y0)]
    for i, v in enumerate(vs):
        for j, w in enumerate(where):
            if w[0] == "branch":
                M[i, j] = pr.rep_eval_branch(v, w[1])
            else:
                M[i, j] = pr.rep_eval_regular(v, w[1])
    assert np.abs(M - np.eye(g)).max() <= 1e-12


def test_v_basis_vanishes_on_other_sheet(cfg_g2):
    # v_1..v_{g-1} vanish at the involuted marked point: numerator carries
    # the (u - y0) factor, so the value at u = y0 is zero on either sheet
    vs = pr.v_basis(cfg_g2)
    for v in vs[:-1]:
        val = v.numer_at(cfg_g2.y0) / sqrt_plus(cfg_g2, cfg_g2.y0)
        assert abs(val) <= 1e-14


def sqrt_plus(cfg, z):
    from isoharm.curve import sqrt_delta

    return complex(sqrt_delta(cfg, z))


def test_v_basis_g2_hand_expansion(cfg_g2):
    # g = 2: v_1 = phi (u - y0) / (phi(P_u1) (u1 - y0)), v_2 = phi (u - u1) / (phi(Q0)(y0 - u1))
    from isoharm.curve import phi_branch

    vs = pr.v_basis(cfg_g2)
    u1, y0 = cfg_g2.u[0], cfg_g2.y0
    k1 = cfg_g2.branch_points.index(u1)
    c1 = 1.0 / (phi_branch(cfg_g2, k1) * (u1 - y0))
    np.testing.assert_allclose(
        np.asarray(vs[0].numer), np.array([-y0 * c1, c1]), rtol=1e-13
    )
    c2 = 1.0 / (phi_q0(cfg_g2) * (y0 - u1))
    np.testing.assert_allclose(
        np.asarray(vs[1].numer), np.array([-u1 * c2, c2]), rtol=1e-13
    )


def test_omega_a_periods_vanish(cfg_g3):
    om = pr.omega_third_kind(cfg_g3, 256)
    mdl = cfg_g3.model()
    for j in range(cfg_g3.g):
        per = pr.gap_cycle_period(om.rep.plane, mdl, j, 256, pole=cfg_g3.y0)
        assert abs(per) <= 1e-10


def test_omega_residues(cfg_g2):
    om = pr.omega_third_kind(cfg_g2, 256)
    # small-circle residue on the principal sheet is -1 (Q0 lives on sheet -1)
    r_plus = pr.residue_at_regular(om.rep.plane, cfg_g2.y0, 0.2, 128)
    assert r_plus == pytest.approx(-1.0, abs=1e-10)
    sheet_minus = lambda z: om.rep.numer_at(z) / (
        (z - cfg_g2.y0) * -np.asarray(sqrt_plus_arr(cfg_g2, z))
    )
    r_minus = pr.residue_at_regular(sheet_minus, cfg_g2.y0, 0.2, 128)
    assert r_minus == pytest.approx(+1.0, abs=1e-10)


def sqrt_plus_arr(cfg, z):
    from isoharm.curve import sqrt_delta

    return sqrt_delta(cfg, z)


def test_omega_eval_residue_identities(cfg_g3):
    # (res0) through the evaluation route, plus (res1)
    om = pr.omega_third_kind(cfg_g3, 256)
    a12 = pr.a12_values(cfg_g3, om)
    pts = np.asarray(cfg_g3.branch_points)
    g, y0 = cfg_g3.g, cfg_g3.y0
    for s in range(g):
        assert abs(np.sum(a12 / (pts - y0) ** s)) <= 1e-10
    lhs = np.sum(a12 / (pts - y0) ** g)
    assert lhs == pytest.approx(-cfg_g3.t * phi_q0(cfg_g3), abs=1e-10)


def test_omega_infinity_finite_and_delta_form(cfg_g2):
    om = pr.omega_third_kind(cfg_g2, 256)
    val = pr.omega_eval(cfg_g2, om, "infinity")
    vs = pr.v_basis(cfg_g2)
    alt = sum(d * pr.rep_eval_infinity(v) for d, v in zip(om.delta, vs))
    assert val == pytest.approx(alt, rel=1e-12)
    assert np.isfinite(abs(val))


def test_omega_bperiods_constant_on_isoharmonic_path(cfg_g2):
    om0 = pr.omega_third_kind(cfg_g2, 256)
    path = df.integrate_path(cfg_g2, (2.15, 5.2), 5, policy="harmonic")
    omN = pr.omega_third_kind(path.configs[-1], 256)
    # c_hat1 is read off the b-periods: constant along the family
    np.testing.assert_allclose(om0.c_hat1, omN.c_hat1, atol=1e-9)
    # and ties to the harmonic partial sums with the frozen orientation
    ps = ms.harmonic_partial_sums(cfg_g2, 256)
    np.testing.assert_allclose(om0.c_hat1.real, -ps / 2.0, atol=1e-10)


def test_evaluated_w_forms_have_vanishing_a_periods(cfg_g2):
    pdata = pr.period_data(cfg_g2, 256)
    mdl = cfg_g2.model()
    winf = pr.w_form_at_infinity(cfg_g2, pdata)
    for j in range(cfg_g2.g):
        per = pr.gap_cycle_period(winf.plane, mdl, j, 256)
        assert abs(per) <= 1e-10
    for k, a in enumerate(cfg_g2.branch_points):
        wrep = pr.w_form_at_branch(cfg_g2, pdata, k)
        for j in range(cfg_g2.g):
            per = pr.gap_cycle_period(
                wrep.plane, mdl, j, 256, pole=a,
                numer_only=lambda z, w=wrep, a=a: w.numer_at(z) / (z - a),
            )
            assert abs(per) <= 1e-10, (k, j)


def test_bilinear_spot_check(cfg_g2):
    # b-period of W(., P_{a_j}) equals 2 pi i omega(P_{a_j}); the collapsed
    # b-representatives traverse bands 1..k, so pick the branch point x_g
    # which stays off those bands
    pdata = pr.period_data(cfg_g2, 256)
    omegas, _ = pr.normalized_basis(cfg_g2, 256)
    mdl = cfg_g2.model()
    k = cfg_g2.branch_points.index(cfg_g2.x[-1])
    wrep = pr.w_form_at_branch(cfg_g2, pdata, k)
    for bk in range(cfg_g2.g):
        lhs = pr.band_chain_period(wrep.plane, mdl, bk, 512)
        rhs = 2j * np.pi * pr.rep_eval_branch(omegas[bk], k)
        assert lhs == pytest.approx(rhs, rel=1e-8)


def test_abel_infinity_cubic(cubic_system):
    A = pr.abel_infinity(cubic_system, 256)
    assert np.abs(A.real).max() <= 1e-12
    np.testing.assert_allclose(A.imag, [1.0 / 3.0, 2.0 / 3.0], atol=1e-8)


def test_abel_infinity_matches_frequencies():
    E = IntervalSystem((9.0, 6.5, 4.0, 3.0, 1.0, 0.0))
    A = pr.abel_infinity(E, 256)
    f = np.asarray(ms.frequency_map(E, 256).values)
    np.testing.assert_allclose(A.imag, f, atol=1e-8)
