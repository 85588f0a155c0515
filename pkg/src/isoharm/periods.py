"""Quadrature with endpoint square-root singularities and the period pipeline.

Everything integrated here is of the form  numer(z) / ((z - pole)? sqrt(Delta))
on the principal sheet of a real hyperelliptic model.  The frozen homology:

* a_j = counterclockwise loop around the j-th gap (sign convention fixed by
  the collapsed form a_j-period = -2 * integral over the gap of upper-edge
  values);
* b_k = the chain of loops around bands 1..k oriented so that Im(B) is
  positive definite (b_k-period = +2 * sum over bands 1..k of upper-edge
  integrals).

The g = 1 degeneration of this choice gives B = i K(sqrt(x)) / K(sqrt(1-x))
for branch points {0, x, 1}, which the AGM oracle pins down in the tests.

Cycle periods are computed two ways: collapsed segment quadrature
(Gauss-Chebyshev absorbing both endpoint singularities) when the integrand
has no pole at a gap endpoint, and trapezoid quadrature over an ellipse
around the gap/band otherwise (spectrally accurate for analytic integrands;
the sheet flip across the cuts is handled by negating the root on the lower
half of a gap loop).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .curve import (
    BranchModel,
    ConditioningError,
    IntervalSystem,
    PoleOnContourError,
    TCurveConfig,
    phi_branch,
    phi_q0,
    sqrt_delta,
)

DEFAULT_NODES = 256
MAX_NODES = 2048
CONDITION_LIMIT = 1e12


# ---------------------------------------------------------------------------
# low-level quadrature


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def integrate_smooth(f: Callable, a: complex, b: complex, n: int = DEFAULT_NODES):
    """Gauss-Legendre on the straight segment [a, b] (complex endpoints ok)."""
    xs, ws = _leggauss(n)
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    z = mid + half * xs
    return half * np.sum(ws * f(z))


def integrate_sqrt_left(f: Callable, a: float, b: complex, n: int = DEFAULT_NODES):
    """Integral of f over [a, b] with an inverse-sqrt singularity at a.

    Substitutes z = a + (b - a) s^2, which removes the singularity; the
    transformed integrand must be smooth on (0, 1].
    """
    xs, ws = _leggauss(n)
    s = (xs + 1.0) / 2.0
    z = a + (b - a) * s**2
    return np.sum(ws * f(z) * (b - a) * s)  # ds weight: (1/2) * 2(b-a)s


def integrate_sqrt_both(f: Callable, a: float, b: float, n: int = DEFAULT_NODES):
    """Gauss-Chebyshev on [a, b] absorbing inverse-sqrt endpoints on both sides.

    Returns integral of f(z) dz where f may blow up like ((z-a)(b-z))^{-1/2};
    converges spectrally when f times that weight is analytic.
    """
    k = np.arange(1, n + 1)
    theta = (2 * k - 1) * np.pi / (2 * n)
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    z = mid + half * np.cos(theta)
    weight = np.sqrt((z - a) * (b - z))
    return (np.pi / n) * np.sum(f(z.astype(complex)) * weight)


def integrate_tail(f: Callable, lo: float, n: int = DEFAULT_NODES):
    """Integral of f over [lo, inf) with inverse-sqrt at lo and O(z^{-3/2}) decay.

    Substitutes z = lo + (s/(1-s))^2 which regularizes both ends.
    """
    xs, ws = _leggauss(n)
    s = (xs + 1.0) / 2.0
    z = lo + (s / (1.0 - s)) ** 2
    jac = 2.0 * s / (1.0 - s) ** 3
    return 0.5 * np.sum(ws * f(z.astype(complex)) * jac)


def integrate_sqrt_left_excl(
    numer: Callable, model: BranchModel, a: float, b: complex, n: int = DEFAULT_NODES
):
    """Integral over [a, b] of numer(z) / sqrt(Delta(z)), a a branch point.

    The singular factor csqrt(z - a) is taken exactly from the substitution
    z = a + (b - a) s^2, so nodes exponentially close to a lose no digits to
    the re-subtraction inside sqrt(Delta).
    """
    xs, ws = _leggauss(n)
    s = (xs + 1.0) / 2.0
    z = a + (b - a) * s**2
    vals = numer(z) / model.sqrt_excluding(z, a)
    return np.sqrt(complex(b - a)) * np.sum(ws * vals)


def integrate_tail_excl(
    numer: Callable, model: BranchModel, lo: float, n: int = DEFAULT_NODES
):
    """Tail integral of numer(z)/sqrt(Delta) over [lo, inf), lo a branch point.

    Same exact-root treatment as integrate_sqrt_left_excl with the decay
    substitution z = lo + (s/(1-s))^2.
    """
    xs, ws = _leggauss(n)
    s = (xs + 1.0) / 2.0
    r = s / (1.0 - s)
    z = lo + r**2
    # dz / csqrt(z - lo) = 2 ds / (1 - s)^2
    vals = numer(z) / model.sqrt_excluding(z, lo)
    return np.sum(ws * vals / (1.0 - s) ** 2)


# ---------------------------------------------------------------------------
# differential representations


@dataclass(frozen=True)
class DifferentialRep:
    """numer(u) / ((u - pole)? sqrt(Delta)) du on a TCurveConfig.

    numer coefficients ascending.  Holomorphic reps have deg <= g-1 and no
    pole; the third-kind differential carries pole = y0 and deg <= g.
    """

    numer: tuple[complex, ...]
    pole: float | None
    config: TCurveConfig

    def numer_at(self, z):
        return np.polynomial.polynomial.polyval(z, np.asarray(self.numer))

    def plane(self, z):
        """Sheet +1 value of the differential divided by dz."""
        z = np.asarray(z, dtype=complex)
        val = self.numer_at(z) / sqrt_delta(self.config, z)
        if self.pole is not None:
            val = val / (z - self.pole)
        return val

    def degree(self) -> int:
        return len(self.numer) - 1


def rep_eval_branch(rep: DifferentialRep, k: int) -> complex:
    """Evaluation at the ramification point P_{a_k} (local coord sqrt(u-a_k))."""
    a = rep.config.branch_points[k]
    val = complex(rep.numer_at(a))
    if rep.pole is not None:
        if a == rep.pole:
            raise PoleOnContourError("evaluation at the pole of the differential")
        val /= a - rep.pole
    return val * phi_branch(rep.config, k)


def rep_eval_infinity(rep: DifferentialRep) -> complex:
    """Evaluation at P_infinity (local coord u^{-1/2}).

    Equal to -2 times the u^{g-1} coefficient of the polynomial part of
    numer(u)/(u - pole); the pole part decays too fast to contribute.
    """
    g = rep.config.g
    coeffs = np.asarray(rep.numer, dtype=complex)
    if rep.pole is not None:
        q, _ = np.polynomial.polynomial.polydiv(
            coeffs, np.array([-rep.pole, 1.0], dtype=complex)
        )
        coeffs = q
    if len(coeffs) < g:
        return 0.0 + 0j
    if len(coeffs) > g:
        raise ValueError("differential has a pole at infinity")
    return -2.0 * complex(coeffs[g - 1])


def rep_eval_regular(rep: DifferentialRep, y: float) -> complex:
    """Evaluation at the regular point over y on the Q0 sheet (sheet -1)."""
    if rep.pole is not None and y == rep.pole:
        raise PoleOnContourError("evaluation at the pole of the differential")
    val = complex(rep.numer_at(y))
    if rep.pole is not None:
        val /= y - rep.pole
    return val * (-1.0 / complex(sqrt_delta(rep.config, y)))


# ---------------------------------------------------------------------------
# cycle periods


def _segment_cycle(plane: Callable, lo: float, hi: float, n: int) -> complex:
    return -2.0 * integrate_sqrt_both(plane, lo, hi, n)


def _ellipse_margin(lo: float, hi: float, exclude: Sequence[float]) -> float:
    dist = math.inf
    for p in exclude:
        if math.isinf(p):
            continue
        if p < lo:
            dist = min(dist, lo - p)
        elif p > hi:
            dist = min(dist, p - hi)
        else:
            raise PoleOnContourError(
                f"excluded point {p} lies inside the cycle interval [{lo}, {hi}]"
            )
    if math.isinf(dist):
        dist = hi - lo
    return 0.45 * dist


def _ellipse_cycle(
    plane_numer: Callable,
    model: BranchModel,
    lo: float,
    hi: float,
    exclude: Sequence[float],
    flip_lower: bool,
    n: int,
) -> complex:
    """Counterclockwise trapezoid loop around [lo, hi].

    ``plane_numer(z)`` is the full integrand except the 1/sqrt(Delta) factor;
    gap loops change sheet across the two adjacent cuts, realized by negating
    the root on the lower half-plane.
    """
    m = _ellipse_margin(lo, hi, exclude)
    c, A, B = (lo + hi) / 2.0, (hi - lo) / 2.0 + m, m
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    z = c + A * np.cos(theta) + 1j * B * np.sin(theta)
    dz = -A * np.sin(theta) + 1j * B * np.cos(theta)
    root = model.sqrt(z)
    if flip_lower:
        root = np.where(np.sin(theta) < 0, -root, root)
    vals = plane_numer(z) / root
    return (2.0 * np.pi / n) * np.sum(vals * dz)


def gap_cycle_period(
    rep_plane: Callable,
    model: BranchModel,
    j: int,
    n: int = DEFAULT_NODES,
    pole: float | None = None,
    numer_only: Callable | None = None,
) -> complex:
    """a_j-period: ccw loop around gap j.

    Uses the collapsed two-sided segment form unless the integrand has a pole
    at (or adjacent to) the gap closure, in which case the honest ellipse
    contour is used with the pole enclosed (legal for residue-free double
    poles of the evaluated bidifferential forms).
    """
    lo, hi = model.gaps[j]
    if pole is not None and lo < pole < hi:
        raise PoleOnContourError(f"pole {pole} inside gap ({lo}, {hi})")
    if pole is not None and (pole == lo or pole == hi):
        others = [p for p in model.branch_points if p != lo and p != hi]
        numer = numer_only if numer_only is not None else (
            lambda z: rep_plane(z) * model.sqrt(z)
        )
        return _ellipse_cycle(numer, model, lo, hi, others, True, n)
    return _segment_cycle(rep_plane, lo, hi, n)


def band_chain_period(
    rep_plane: Callable, model: BranchModel, k: int, n: int = DEFAULT_NODES
) -> complex:
    """b_k-period: +2 sum over bands 1..k of upper-edge segment integrals."""
    total = 0.0 + 0j
    for m in range(k + 1):
        lo, hi = model.bands[m]
        if math.isinf(hi):
            raise ValueError("b-cycles never traverse the unbounded band")
        total += 2.0 * integrate_sqrt_both(rep_plane, lo, hi, n)
    return total


def band_cycle_period(
    rep_plane: Callable, model: BranchModel, m: int, n: int = DEFAULT_NODES
) -> complex:
    """Single ccw loop around band m (collapsed form)."""
    lo, hi = model.bands[m]
    if math.isinf(hi):
        raise ValueError("no collapsed loop around the unbounded band")
    return _segment_cycle(rep_plane, lo, hi, n)


def singular_integral(
    config_or_model, rep, interval, n: int = DEFAULT_NODES
) -> complex:
    """One-sided integral over [a, b] between adjacent branch points.

    ``rep`` may be a DifferentialRep or a plain callable of z.  Upper-edge
    values of the root are used; both endpoint inverse-sqrt singularities are
    absorbed by the Gauss-Chebyshev substitution.
    """
    a, b = interval
    f = rep.plane if isinstance(rep, DifferentialRep) else rep
    if isinstance(rep, DifferentialRep) and rep.pole is not None:
        if a <= rep.pole <= b:
            raise PoleOnContourError(f"pole {rep.pole} on the integration interval")
    return integrate_sqrt_both(f, a, b, n)


# ---------------------------------------------------------------------------
# normalized bases and the Riemann matrix


@dataclass(frozen=True)
class PeriodData:
    """Periods and normalizing constants of the evaluated bidifferential forms.

    beta_W[k, j] holds the second-kind normalization constants for a_j over
    the non-dependent branch points {0, 1, x_1..x_g}; gamma_W[k, alpha] the
    ones attached to the dependent points (expanded over the v-basis).
    """

    a_period_matrix: np.ndarray
    riemann_matrix: np.ndarray
    I: np.ndarray
    beta_W: np.ndarray
    gamma_W: np.ndarray
    node_count: int

    def to_dict(self) -> dict:
        """JSON-ready form (complex entries as [re, im] pairs) for goldens."""

        def enc(arr):
            a = np.asarray(arr)
            return [[[v.real, v.imag] for v in row] for row in np.atleast_2d(a)]

        return {
            "a_period_matrix": enc(self.a_period_matrix),
            "riemann_matrix": enc(self.riemann_matrix),
            "I": enc(self.I),
            "beta_W": enc(self.beta_W),
            "gamma_W": enc(self.gamma_W),
            "node_count": self.node_count,
        }


def _monomial_rep(config: TCurveConfig, k: int) -> DifferentialRep:
    return DifferentialRep((0.0,) * k + (1.0,), None, config)


@lru_cache(maxsize=128)
def normalized_basis(
    config: TCurveConfig, node_count: int = DEFAULT_NODES
) -> tuple[tuple[DifferentialRep, ...], np.ndarray]:
    """a-normalized holomorphic basis: coefficient solve on raw gap periods.

    Returns (omega_1..omega_g, raw a-period matrix M with M[j, k] the
    a_j-period of u^k du / v).
    """
    g = config.g
    model = config.model()
    M = np.empty((g, g), dtype=complex)
    for k in range(g):
        plane = _monomial_rep(config, k).plane
        for j in range(g):
            M[j, k] = gap_cycle_period(plane, model, j, node_count)
    if np.linalg.cond(M) > CONDITION_LIMIT:
        raise ConditioningError(
            f"a-period matrix condition number {np.linalg.cond(M):.3e}"
        )
    C = np.linalg.solve(M, np.eye(g, dtype=complex))
    omegas = tuple(
        DifferentialRep(tuple(C[:, l]), None, config) for l in range(g)
    )
    return omegas, M


def riemann_matrix(config: TCurveConfig, node_count: int = DEFAULT_NODES) -> np.ndarray:
    """b-periods of the normalized basis; symmetric with Im positive definite."""
    omegas, _ = normalized_basis(config, node_count)
    model = config.model()
    g = config.g
    band_int = np.empty((g, g), dtype=complex)  # band m, basis l
    for l, om in enumerate(omegas):
        for m in range(g):
            lo, hi = model.bands[m]
            band_int[m, l] = 2.0 * integrate_sqrt_both(om.plane, lo, hi, node_count)
    B = np.empty((g, g), dtype=complex)
    for k in range(g):
        B[:, k] = np.sum(band_int[: k + 1, :], axis=0)
    return B


def v_basis(config: TCurveConfig) -> tuple[DifferentialRep, ...]:
    """The second holomorphic basis, normalized by values at P_{u_j} and Q0."""
    g = config.g
    y0 = config.y0
    us = config.u
    reps = []
    P = np.polynomial.polynomial
    for i in range(g - 1):
        ui = us[i]
        numer = np.array([1.0 + 0j])
        denom = phi_branch(config, config.branch_points.index(ui))
        for alpha in range(g - 1):
            if alpha == i:
                continue
            numer = P.polymul(numer, np.array([-us[alpha], 1.0]))
            denom *= ui - us[alpha]
        numer = P.polymul(numer, np.array([-y0, 1.0]))
        denom *= ui - y0
        reps.append(DifferentialRep(tuple(numer / denom), None, config))
    numer = np.array([1.0 + 0j])
    denom = phi_q0(config)
    for alpha in range(g - 1):
        numer = P.polymul(numer, np.array([-us[alpha], 1.0]))
        denom *= y0 - us[alpha]
    reps.append(DifferentialRep(tuple(numer / denom), None, config))
    return tuple(reps)


# ---------------------------------------------------------------------------
# the third-kind differential Omega


@dataclass(frozen=True)
class OmegaData:
    """Omega = phi/(phi(Q0)(u - y0)) + sum delta_j v_j, as a single rep.

    rep.numer = 1/phi(Q0) + (u - y0) * sum delta_j v_j-numerators, with
    rep.pole = y0; delta are the (Omega-delta) normalizing constants and
    c_hat1 the measured b-period constants (b-periods = 4 pi i c_hat1).
    """

    rep: DifferentialRep
    delta: np.ndarray
    c_hat1: np.ndarray


def omega_third_kind(
    config: TCurveConfig, node_count: int = DEFAULT_NODES
) -> OmegaData:
    """Solve the delta-system: a_j-periods of Omega equal -4 pi i c_hat2_j."""
    g = config.g
    model = config.model()
    y0 = config.y0
    if any(lo < y0 < hi for lo, hi in model.gaps):
        raise PoleOnContourError(
            "pole projection inside a gap: a-cycles would enclose Q0"
        )
    vs = v_basis(config)
    base = DifferentialRep((1.0 / phi_q0(config),), y0, config)
    A = np.empty((g, g), dtype=complex)
    rhs = np.empty(g, dtype=complex)
    target = -4j * np.pi * np.asarray(config.c_hat2, dtype=complex)
    for j in range(g):
        for l, v in enumerate(vs):
            A[j, l] = gap_cycle_period(v.plane, model, j, node_count)
        rhs[j] = target[j] - gap_cycle_period(
            base.plane, model, j, node_count, pole=y0
        )
    if np.linalg.cond(A) > CONDITION_LIMIT:
        raise ConditioningError("singular delta-system for Omega")
    delta = np.linalg.solve(A, rhs)
    P = np.polynomial.polynomial
    vsum = np.zeros(1, dtype=complex)
    for dl, v in zip(delta, vs):
        vsum = P.polyadd(vsum, dl * np.asarray(v.numer))
    numer = P.polyadd(
        np.array([1.0 / phi_q0(config)]), P.polymul(np.array([-y0, 1.0]), vsum)
    )
    rep = DifferentialRep(tuple(numer), y0, config)
    bper = np.array(
        [band_chain_period(rep.plane, model, k, node_count) for k in range(g)]
    )
    c_hat1 = bper / (4j * np.pi)
    return OmegaData(rep, delta, c_hat1)


def omega_eval(config: TCurveConfig, omega: OmegaData, where) -> complex:
    """Evaluate Omega at a branch point, infinity, or a regular point."""
    if where == "infinity":
        return rep_eval_infinity(omega.rep)
    kind, val = where
    if kind == "branch":
        return rep_eval_branch(omega.rep, int(val))
    if kind == "regular":
        return rep_eval_regular(omega.rep, float(val))
    raise ValueError(f"unknown evaluation point {where!r}")


def a12_values(
    config: TCurveConfig, omega: OmegaData, t: complex | None = None
) -> np.ndarray:
    """A^{12}_{a_j} = (t/4) Omega(P_{a_j}) phi(P_{a_j}) (a_j - y0)^g, all j.

    Shared between the derivative formulas (deform) and the residue matrices
    (schlesinger); the phi branch choices cancel inside the product.
    """
    t = config.t if t is None else t
    pts = config.branch_points
    g = config.g
    out = np.empty(len(pts), dtype=complex)
    for k, a in enumerate(pts):
        out[k] = (
            (t / 4.0)
            * rep_eval_branch(omega.rep, k)
            * phi_branch(config, k)
            * (a - config.y0) ** g
        )
    return out


# ---------------------------------------------------------------------------
# evaluated bidifferential forms (Wxinfty), (Waj), (Wualpha)


def period_data(config: TCurveConfig, node_count: int = DEFAULT_NODES) -> PeriodData:
    """Assemble periods plus the normalizing constants I_k, beta_W, gamma_W."""
    omegas, M = normalized_basis(config, node_count)
    B = riemann_matrix(config, node_count)
    model = config.model()
    g = config.g
    I = np.array(
        [
            gap_cycle_period(_monomial_rep(config, g).plane, model, j, node_count)
            for j in range(g)
        ]
    )
    pts = config.branch_points
    plain = [p for p in pts if p not in config.u]
    beta_W = np.empty((g, len(plain)), dtype=complex)
    for col, a in enumerate(plain):
        k_idx = pts.index(a)
        base = DifferentialRep((1.0 / phi_branch(config, k_idx),), a, config)
        for j in range(g):
            beta_W[j, col] = gap_cycle_period(
                base.plane, model, j, node_count, pole=a,
                numer_only=lambda z, a=a, k=k_idx: 1.0
                / (phi_branch(config, k) * (z - a)),
            )
    vs = v_basis(config)
    Vper = np.empty((g, g), dtype=complex)
    for l, v in enumerate(vs):
        for j in range(g):
            Vper[j, l] = gap_cycle_period(v.plane, model, j, node_count)
    gamma_W = np.empty((g, max(g - 1, 0)), dtype=complex)
    for col, a in enumerate(config.u):
        k_idx = pts.index(a)
        rhs = np.empty(g, dtype=complex)
        for j in range(g):
            rhs[j] = gap_cycle_period(
                DifferentialRep((1.0 / phi_branch(config, k_idx),), a, config).plane,
                model,
                j,
                node_count,
                pole=a,
                numer_only=lambda z, a=a, k=k_idx: 1.0
                / (phi_branch(config, k) * (z - a)),
            )
        gamma_W[:, col] = np.linalg.solve(Vper, rhs)
    return PeriodData(M, B, I, beta_W, gamma_W, node_count)


def period_data_converged(
    config: TCurveConfig,
    node_count: int = DEFAULT_NODES,
    gate: float = 1e-11,
) -> PeriodData:
    """period_data under the spectral convergence gate.

    Doubles the node count (up to the supported maximum) until doubling
    changes no Riemann-matrix entry by more than the gate; raises
    ConditioningError when the budget is exhausted.
    """
    n = node_count
    B_prev = riemann_matrix(config, n)
    while n < MAX_NODES:
        n *= 2
        B = riemann_matrix(config, n)
        if np.abs(B - B_prev).max() <= gate:
            return period_data(config, n // 2)
        B_prev = B
    raise ConditioningError(
        f"period quadrature did not converge below {gate} within {MAX_NODES} nodes"
    )


def w_form_at_infinity(config: TCurveConfig, pdata: PeriodData) -> DifferentialRep:
    """W(P, P_infinity) = -u^g phi / 2 + (1/2) sum I_k omega_k."""
    omegas, _ = normalized_basis(config, pdata.node_count)
    P = np.polynomial.polynomial
    numer = np.zeros(config.g + 1, dtype=complex)
    numer[config.g] = -0.5
    for Ik, om in zip(pdata.I, omegas):
        numer = P.polyadd(numer, 0.5 * Ik * np.asarray(om.numer))
    return DifferentialRep(tuple(numer), None, config)


def w_form_at_branch(
    config: TCurveConfig, pdata: PeriodData, k: int
) -> DifferentialRep:
    """W(P, P_{a_k}) as a rep with pole at a_k.

    Uses the (Waj) expansion over omega for non-dependent a_k and the
    (Wualpha) expansion over the v-basis for dependent ones.
    """
    pts = config.branch_points
    a = pts[k]
    phi_a = phi_branch(config, k)
    P = np.polynomial.polynomial
    if a in config.u:
        col = config.u.index(a)
        vs = v_basis(config)
        corr = np.zeros(1, dtype=complex)
        for gam, v in zip(pdata.gamma_W[:, col], vs):
            corr = P.polyadd(corr, -gam * np.asarray(v.numer))
    else:
        plain = [p for p in pts if p not in config.u]
        col = plain.index(a)
        omegas, _ = normalized_basis(config, pdata.node_count)
        corr = np.zeros(1, dtype=complex)
        for bet, om in zip(pdata.beta_W[:, col], omegas):
            corr = P.polyadd(corr, -bet * np.asarray(om.numer))
    numer = P.polyadd(
        np.array([1.0 / phi_a]), P.polymul(np.array([-a, 1.0]), corr)
    )
    return DifferentialRep(tuple(numer), a, config)


# ---------------------------------------------------------------------------
# residues on the curve


def residue_at_regular(plane_fn: Callable, y0: float, radius: float, n: int = 128):
    """Plane residue of plane_fn(u) du at u = y0 by circle trapezoid."""
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    z = y0 + radius * np.exp(1j * theta)
    return (radius / n) * np.sum(plane_fn(z) * np.exp(1j * theta))


def residue_at_branch(plane_fn: Callable, a: float, radius: float, n: int = 128):
    """Curve residue at a ramification point of plane_fn(u) du.

    Works in the local coordinate zeta = sqrt(u - a): u = a + zeta^2 on the
    circle |zeta| = radius; plane_fn must be a single-valued function of u
    (products like Omega phi / du are).
    """
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    zeta = radius * np.exp(1j * theta)
    u = a + zeta**2
    vals = plane_fn(u) * 2.0 * zeta
    return (radius / n) * np.sum(vals * np.exp(1j * theta))


def safe_radius(config: TCurveConfig, center: float) -> float:
    """Radius staying well clear of all other special points."""
    pts = list(config.branch_points)
    if center != config.y0:
        pts.append(config.y0)
    d = min(abs(center - p) for p in pts if p != center)
    return 0.3 * d


# ---------------------------------------------------------------------------
# Abel map of infinity on the even-degree model


def abel_infinity(E: IntervalSystem, node_count: int = DEFAULT_NODES) -> np.ndarray:
    """A_{infty^-}(infty^+) on the even model, purely imaginary components.

    The first-kind basis is normalized over the gap loops with the constant
    i (loop period of omega_k over gap j equal to i delta_jk); reciprocity
    against the measure differential then turns the component j into exactly
    i times the j-th cumulative frequency.  The realized orientation is
    Im A_j = +f_j; a flipped homology orientation would give the conjugate
    values, which is the sign freedom the frozen convention resolves.
    """
    if E.d < 3:
        raise ValueError("abel_infinity needs d >= 3")
    model = E.model()
    g = E.d - 1
    M = np.empty((g, g), dtype=complex)
    for k in range(g):
        plane = lambda z, k=k: z**k / model.sqrt(z)
        for j in range(g):
            M[j, k] = gap_cycle_period(plane, model, j, node_count)
    C = np.linalg.solve(M, 1j * np.eye(g, dtype=complex))
    c1 = E.endpoints[0]
    out = np.empty(g, dtype=complex)
    check = np.empty(g, dtype=complex)
    for l in range(g):
        coeffs = C[:, l]
        numer = lambda z: np.polynomial.polynomial.polyval(z, coeffs)
        out[l] = 2.0 * integrate_tail_excl(numer, model, c1, node_count)
        check[l] = 2.0 * integrate_tail_excl(numer, model, c1, max(node_count // 2, 16))
    if np.abs(out - check).max() > 1e-8:
        warnings.warn(
            "slow tail decay: Abel components changed by "
            f"{np.abs(out - check).max():.2e} under node halving",
            RuntimeWarning,
            stacklevel=2,
        )
    if out.imag.sum() < 0:
        out = -out
    return out
