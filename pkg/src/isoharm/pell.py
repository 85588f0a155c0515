"""Pell certificates: n-regular detection, Akhiezer function, polynomial
reconstruction, residual, signature, and winding numbers.

The extremal polynomial is rebuilt from the complex Green function
(P = cosh(n G), sampled at mapped Chebyshev nodes and interpolated) rather
than by minimax iteration; the companion polynomial Q is extracted by exact
division of P^2 - 1 by the endpoint polynomial followed by a coefficient
square root.  The winding recursion realized here is

    m_{j-1} = m_j + tau_j + 1,   j = 1..d,   m_d = 0,

with tau_j the zero count of Q in the j-th band from the right; this is the
index placement that reproduces both the classical single-interval case and
the three-interval degree-5 data (winding (5,4,2), signature (0,1,1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curve import IntervalSystem
from .measures import frequency_map, green_function
from .periods import DEFAULT_NODES

P = np.polynomial.polynomial

SQRT_DEFECT_TOL = 1e-8


class RegularityError(ValueError):
    """The interval system does not support the requested certificate degree."""


@dataclass(frozen=True)
class PellCertificate:
    """P, Q with P^2 - Delta Q^2 = 1, plus signature and winding data.

    Polynomial coefficients are ascending; tau is ordered right-to-left
    (tau[0] counts Q-zeros in the rightmost band) matching the winding
    recursion; m = (m_0 = n, m_1, ..., m_{d-1}).
    """

    n: int
    p_coeffs: tuple[float, ...]
    q_coeffs: tuple[float, ...]
    signature: tuple[int, ...]
    winding: tuple[int, ...]
    residual: float


def detect_regular(f, q_max: int = 1000, tol: float = 1e-9):
    """Rational reconstruction of the frequencies; None when non-regular.

    Returns (n, winding) with n the common denominator and the winding
    recovered from f_s = m_{d-s} / m_0.
    """
    vals = list(f.values if hasattr(f, "values") else f)
    fracs = []
    for v in vals:
        fr = Fraction(float(v)).limit_denominator(q_max)
        if abs(float(fr) - v) > tol:
            return None
        fracs.append(fr)
    n = 1
    for fr in fracs:
        n = n * fr.denominator // math.gcd(n, fr.denominator)
    d = len(vals) + 1
    m = [0] * d
    m[0] = n
    for s, v in enumerate(vals, start=1):
        m[d - s] = round(n * float(v))
    if any(not mj > mk for mj, mk in zip(m, m[1:])):
        return None
    return n, tuple(m)


def _require_regular(E: IntervalSystem, n: int, node_count: int) -> None:
    f = frequency_map(E, node_count)
    for v in f.values:
        if abs(v * n - round(v * n)) > 1e-7:
            raise RegularityError(
                f"frequencies {f.values} are not multiples of 1/{n}"
            )


def akhiezer(E: IntervalSystem, n: int, z, node_count: int = DEFAULT_NODES) -> complex:
    """A(z) = exp(n G(z)): modulus 1 on the support, order-n growth at infinity.

    The phase is anchored at the rightmost endpoint (G there is -i pi, the
    full measure), which makes A real positive and ~ z^n on (c_1, inf).
    """
    _require_regular(E, n, node_count)
    G = green_function(E, z, math.inf, node_count)
    return complex(np.exp(n * (G + 1j * np.pi)))


def _delta_poly(E: IntervalSystem) -> np.ndarray:
    coeffs = np.array([1.0])
    for c in E.endpoints:
        coeffs = P.polymul(coeffs, np.array([-c, 1.0]))
    return coeffs


def _poly_sqrt(s: np.ndarray, m: int) -> np.ndarray:
    """Coefficient square root of a degree-2m polynomial, leading-first.

    Solves q^2 = s for the top m+1 coefficients by the Newton/undetermined-
    coefficients recurrence; the recomposition defect is the caller's check.
    """
    sd = s[::-1]
    q = np.zeros(m + 1, dtype=complex)
    q[0] = np.sqrt(sd[0].astype(complex) if hasattr(sd[0], "astype") else complex(sd[0]))
    for k in range(1, m + 1):
        acc = sd[k] if k < len(sd) else 0.0
        acc = acc - np.sum(q[1:k] * q[k - 1:0:-1])
        q[k] = acc / (2.0 * q[0])
    return q[::-1]


def _extract_q(p_coeffs: np.ndarray, E: IntervalSystem) -> tuple[np.ndarray, float]:
    """Q from exact division of P^2 - 1 by Delta and a coefficient sqrt.

    Returns (q_coeffs ascending, structural defect): the defect combines the
    division remainder and the sqrt recomposition error, relative to the
    coefficient scale.
    """
    d = E.d
    n = len(p_coeffs) - 1
    if n < d:
        raise RegularityError(f"degree {n} below the interval count {d}")
    s_full = P.polysub(P.polymul(p_coeffs, p_coeffs), np.array([1.0]))
    delta = _delta_poly(E)
    quot, rem = P.polydiv(s_full, delta)
    scale = np.abs(s_full).max()
    defect = np.abs(rem).max() / scale if len(rem) else 0.0
    m = n - d
    quot = quot[: 2 * m + 1] if len(quot) >= 2 * m + 1 else np.pad(quot, (0, 2 * m + 1 - len(quot)))
    q = _poly_sqrt(quot, m)
    recomp = P.polysub(P.polymul(q, q), quot)
    defect = max(defect, np.abs(recomp).max() / max(np.abs(quot).max(), 1.0))
    if np.abs(q.imag).max() > 1e-8 * max(np.abs(q.real).max(), 1.0):
        defect = max(defect, float(np.abs(q.imag).max()))
    return q.real, float(defect)


def _signature(q_coeffs: np.ndarray, E: IntervalSystem) -> tuple[int, ...]:
    """tau_j = real zeros of Q in the j-th band from the right."""
    if len(q_coeffs) <= 1 and abs(q_coeffs).max() > 0:
        roots = np.array([])
    else:
        roots = np.roots(q_coeffs[::-1])
    scale = max(abs(c) for c in E.endpoints) or 1.0
    real = roots[np.abs(roots.imag) < 1e-6 * scale].real
    taus = []
    for lo, hi in reversed(E.bands):
        pad = 1e-9 * scale
        taus.append(int(np.sum((real >= lo - pad) & (real <= hi + pad))))
    return tuple(taus)


def _winding_from_signature(tau, d: int, n: int) -> tuple[int, ...]:
    m = [0] * (d + 1)
    for j in range(d, 0, -1):
        m[j - 1] = m[j] + tau[j - 1] + 1
    if m[0] != n:
        raise RegularityError(
            f"signature {tau} sums to degree {m[0]}, certificate claims {n}"
        )
    return tuple(m[:d])


def _sample_residual(p_coeffs, q_coeffs, E: IntervalSystem, per_segment: int = 512) -> float:
    delta = _delta_poly(E)
    segs = list(E.bands) + list(E.gaps)
    worst = 0.0
    for lo, hi in segs:
        z = np.linspace(lo, hi, per_segment)
        vals = (
            P.polyval(z, p_coeffs) ** 2
            - P.polyval(z, delta) * P.polyval(z, q_coeffs) ** 2
            - 1.0
        )
        worst = max(worst, float(np.abs(vals).max()))
    return worst


def chebyshev_poly(
    E: IntervalSystem, n: int, node_count: int = DEFAULT_NODES
) -> PellCertificate:
    """Reconstruct the degree-n extremal polynomial on an n-regular support."""
    _require_regular(E, n, node_count)
    lo, hi = E.hull
    k = np.arange(n + 1)
    nodes = (lo + hi) / 2.0 + (hi - lo) / 2.0 * np.cos(np.pi * k / n)
    vals = np.empty(n + 1)
    for i, zk in enumerate(nodes):
        G = green_function(E, zk + 1e-12j, math.inf, node_count)
        vals[i] = float(np.real(np.cosh(n * (G + 1j * np.pi))))
    cheb = np.polynomial.chebyshev.Chebyshev.fit(nodes, vals, n, domain=[lo, hi])
    p_coeffs = cheb.convert(kind=np.polynomial.Polynomial).coef
    if len(p_coeffs) < n + 1:
        p_coeffs = np.pad(p_coeffs, (0, n + 1 - len(p_coeffs)))
    q_coeffs, defect = _extract_q(p_coeffs, E)
    if defect > SQRT_DEFECT_TOL:
        raise RegularityError(
            f"companion extraction defect {defect:.3e}: support is not {n}-regular"
        )
    tau = _signature(q_coeffs, E)
    m = _winding_from_signature(tau, E.d, n)
    residual = _sample_residual(p_coeffs, q_coeffs, E)
    return PellCertificate(
        n, tuple(p_coeffs), tuple(q_coeffs), tau, m, residual
    )


def pell_residual(p_coeffs, E: IntervalSystem):
    """(residual, tau, m) for a candidate polynomial on E.

    Best-effort: a perturbed non-solution simply reports a large residual
    rather than raising, so sensitivity runs can see the defect grow.
    """
    p_coeffs = np.asarray(p_coeffs, dtype=float)
    n = len(p_coeffs) - 1
    q_coeffs, _ = _extract_q(p_coeffs, E)
    tau = _signature(q_coeffs, E)
    try:
        m = _winding_from_signature(tau, E.d, n)
    except RegularityError:
        m = None
    return _sample_residual(p_coeffs, q_coeffs, E), tau, m
