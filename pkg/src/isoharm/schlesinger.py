"""Residue matrices of the constrained Schlesinger system and their checks.

The traceless 2x2 residues attached to the branch points are built from the
third-kind differential and the holomorphic data:

    A12_a = (t/4) Omega(P_a) phi(P_a) (a - y0)^g
    beta_a = A12_a ( (1/phi(Q0)) sum_{l<g} L_l / (l! (a - y0)^{g-l})
                     - (g/2) Omega(P_inf) )
    A11_a = -1/4 - (g / 2t) beta_a
    A21_a = (1/16 - A11_a^2) / A12_a

beta uses the partition-polynomial form rather than the raw (g-1)-fold
derivative: the two are equal by the derivative identity for 1/phi, and the
polynomial form avoids nested numerical differentiation (the equivalence is
itself a test).  Verification against the system is by central finite
differences of a genuinely isoharmonic perturbation: the perturbed configs
are re-solved at fixed frequencies, never at fixed u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bell import bell_L, sigma_sums
from .curve import TCurveConfig, phi_branch, phi_q0, validate_config
from .deform import dependent_derivatives, solve_harmonic_config
from .measures import harmonic_partial_sums
from .periods import (
    DEFAULT_NODES,
    OmegaData,
    a12_values,
    omega_third_kind,
    rep_eval_branch,
    rep_eval_infinity,
    residue_at_branch,
    residue_at_regular,
    safe_radius,
    w_form_at_branch,
    period_data,
)


@dataclass(frozen=True)
class ResidueSet:
    """Per-branch-point residue matrices plus the shared scalars.

    Arrays are indexed like config.branch_points (ascending); the matrix at
    a_j is [[A11, A12], [A21, -A11]].
    """

    config: TCurveConfig
    t: complex
    A11: np.ndarray
    A12: np.ndarray
    A21: np.ndarray
    beta: np.ndarray
    omega_infinity: complex

    def matrix(self, j: int) -> np.ndarray:
        return np.array(
            [[self.A11[j], self.A12[j]], [self.A21[j], -self.A11[j]]], dtype=complex
        )

    def matrices(self) -> list[np.ndarray]:
        return [self.matrix(j) for j in range(len(self.A12))]


def residue_matrices(
    config: TCurveConfig,
    t: complex | None = None,
    node_count: int = DEFAULT_NODES,
    omega: OmegaData | None = None,
) -> ResidueSet:
    """Assemble the Theorem-2 residue matrices at every branch point."""
    t = config.t if t is None else complex(t)
    om = omega_third_kind(config, node_count) if omega is None else omega
    g = config.g
    y0 = config.y0
    pts = np.array(config.branch_points)
    a12 = a12_values(config, om, t)
    if np.min(np.abs(a12)) < 1e-14 * max(1.0, np.abs(a12).max()):
        raise ArithmeticError("A12 vanishes at a branch point: non-generic configuration")
    oinf = rep_eval_infinity(om.rep)
    sig = sigma_sums(pts, y0, max(g - 1, 0)) if g > 1 else np.array([])
    Ls = [bell_L(l, sig[:l]) for l in range(g)]
    phi0 = phi_q0(config)
    bracket = (
        np.array(
            [
                sum(Ls[l] / (math.factorial(l) * (a - y0) ** (g - l)) for l in range(g))
                for a in pts
            ]
        )
        / phi0
        - (g / 2.0) * oinf
    )
    beta = a12 * bracket
    A11 = -0.25 - (g / (2.0 * t)) * beta
    A21 = (1.0 / 16.0 - A11**2) / a12
    return ResidueSet(config, t, A11, a12, A21, beta, oinf)


def beta_derivative_form(
    config: TCurveConfig, t: complex | None = None, node_count: int = DEFAULT_NODES
) -> np.ndarray:
    """beta via the raw (g-1)-fold y0-derivative of 1/(phi(Q0)(a - y0)).

    The derivative is taken numerically (local polynomial fit, no partition
    polynomials anywhere), so this is an independent route for testing the
    equivalence with the closed form used by residue_matrices.
    """
    t = config.t if t is None else complex(t)
    g = config.g
    y0 = config.y0
    om = omega_third_kind(config, node_count)
    a12 = a12_values(config, om, t)
    oinf = rep_eval_infinity(om.rep)
    pts = np.array(config.branch_points)
    h = 0.05 * min(abs(y0 - p) for p in pts)
    ys = y0 + h * np.cos(np.pi * np.arange(13) / 12)
    deg = 10
    out = np.empty(len(pts), dtype=complex)
    for j, a in enumerate(pts):
        # 1/phi(Q0) = -sqrt(Delta(y)) as a function of the pole position
        vals = np.array(
            [-complex(config.model().sqrt(y)) / (a - y) for y in ys]
        )
        fit = np.polynomial.polynomial.polyfit(ys - y0, vals, deg)
        dcoef = fit[g - 1] * math.factorial(g - 1)  # (g-1)-th derivative at y0
        out[j] = a12[j] * (dcoef / math.factorial(g - 1) - (g / 2.0) * oinf)
    return out


# ---------------------------------------------------------------------------
# the constrained right-hand sides


def _comm(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def constrained_rhs(
    residues: ResidueSet,
    derivs: np.ndarray,
    i: int,
    self_as_sum: bool = True,
) -> dict[float, np.ndarray]:
    """Right-hand sides of the constrained system for direction x_i.

    ``derivs`` is the (g-1) x g matrix du/dx from the same config.  The
    self equation at a_j = x_i is returned either directly or as minus the
    sum of the others (A_infinity = const), per ``self_as_sum``.
    """
    cfg = residues.config
    pts = cfg.branch_points
    xs, us = cfg.x, cfg.u
    xi = xs[i]
    mats = {a: residues.matrix(j) for j, a in enumerate(pts)}
    du = derivs

    def dep_sum(a, skip=None):
        total = np.zeros((2, 2), dtype=complex)
        for k, uk in enumerate(us):
            if skip is not None and uk == skip:
                continue
            total += _comm(mats[uk], mats[a]) / (uk - a) * du[k, i]
        return total

    out: dict[float, np.ndarray] = {}
    for a in pts:
        if a == xi:
            continue
        if a in us:
            m = us.index(a)
            rhs = _comm(mats[xi], mats[a]) / (xi - a) + dep_sum(a, skip=a)
            tail = np.zeros((2, 2), dtype=complex)
            for b in pts:
                if b != a:
                    tail += _comm(mats[b], mats[a]) / (b - a)
            rhs -= du[m, i] * tail
        else:
            rhs = _comm(mats[xi], mats[a]) / (xi - a) + dep_sum(a)
        out[a] = rhs
    if self_as_sum:
        out[xi] = -sum(out[a] for a in out)
    else:
        rhs = np.zeros((2, 2), dtype=complex)
        for b in pts:
            if b != xi:
                rhs -= _comm(mats[xi], mats[b]) / (xi - b)
        for k, uk in enumerate(us):
            rhs += _comm(mats[uk], mats[xi]) / (uk - xi) * du[k, i]
        out[xi] = rhs
    return out


def verify_schlesinger(
    config: TCurveConfig,
    t: complex | None = None,
    i: int = 0,
    h: float = 1e-4,
    node_count: int = DEFAULT_NODES,
) -> dict:
    """Central-difference check of dA_{a_j}/dx_i against the constrained RHS.

    Builds isoharmonically corrected configs at x_i -+ h (frequencies and
    c-hat vectors held fixed), recomputes the residue matrices, and reports
    the maximum entrywise |FD - RHS| over all branch points.
    """
    t = config.t if t is None else complex(t)
    target = harmonic_partial_sums(config, node_count)
    shifted = {}
    for sgn in (+1, -1):
        x2 = list(config.x)
        x2[i] += sgn * h
        template = validate_config(
            x=tuple(x2), u=config.u, y0=config.y0, sigma=config.sigma,
            c_hat1=config.c_hat1, c_hat2=config.c_hat2, t=config.t,
        )
        solved, _ = solve_harmonic_config(template, target, node_count)
        shifted[sgn] = residue_matrices(solved, t, node_count)

    base = residue_matrices(config, t, node_count)
    du, _ = dependent_derivatives(config, node_count)
    rhs = constrained_rhs(base, du, i)
    pts = config.branch_points
    report = {"direction": i, "h": h, "entries": {}}
    worst = 0.0
    for j, a in enumerate(pts):
        fd = (shifted[1].matrix(j) - shifted[-1].matrix(j)) / (2.0 * h)
        defect = np.abs(fd - rhs[a]).max()
        report["entries"][a] = {"fd_vs_rhs": float(defect)}
        worst = max(worst, float(defect))
    report["max_defect"] = worst
    return report


# ---------------------------------------------------------------------------
# residue-sum identity battery


def identity_checks(
    config: TCurveConfig, t: complex | None = None, node_count: int = DEFAULT_NODES
) -> dict:
    """Numerical defects of the residue-sum identities (all expected <= 1e-9)."""
    t = config.t if t is None else complex(t)
    g = config.g
    y0 = config.y0
    om = omega_third_kind(config, node_count)
    rs = residue_matrices(config, t, node_count, omega=om)
    a12 = rs.A12
    pts = np.array(config.branch_points)
    model = config.model()
    out = {}

    for s in range(g):
        out[f"res0_s{s}"] = float(abs(np.sum(a12 / (pts - y0) ** s)))
    out["res1"] = float(abs(np.sum(a12 / (pts - y0) ** g) + t * phi_q0(config)))

    for s in (g + 1, g + 2):
        integrand = lambda u, s=s: om.rep.numer_at(u) / (
            (u - y0) ** (s - g + 1) * model.delta(u)
        )
        rhs = -t * residue_at_regular(integrand, y0, safe_radius(config, y0), 256)
        out[f"res2_s{s}"] = float(abs(np.sum(a12 / (pts - y0) ** s) - rhs))

    # Lemma on beta and A21 sums, and the constant diagonal A_infinity
    out["beta_sum"] = float(abs(np.sum(rs.beta) + t))
    out["a21_sum"] = float(abs(np.sum(rs.A21)))
    out["a11_sum"] = float(abs(np.sum(rs.A11) + 0.25))
    out["a12_sum"] = float(abs(np.sum(a12)))
    out["det"] = float(np.abs(-rs.A11**2 - a12 * rs.A21 + 1.0 / 16.0).max())

    # (res3), (res4) at each dependent branch point
    pdata = period_data(config, node_count)
    phi_at = {j: phi_branch(config, j) for j in range(len(pts))}
    om_at = {j: rep_eval_branch(om.rep, j) for j in range(len(pts))}
    for m, um in enumerate(config.u):
        km = config.branch_points.index(um)
        zr = math.sqrt(safe_radius(config, um))
        # Omega * phi / ((u - u_m) du) as a plane function of u
        plane3 = lambda u: (om.rep.numer_at(u) / (u - y0)) / (model.delta(u) * (u - um))
        res3 = residue_at_branch(plane3, um, zr, 256)
        s3 = 0.5 * sum(
            om_at[j] * phi_at[j] / (pts[j] - um)
            for j in range(len(pts))
            if pts[j] != um
        )
        out[f"res3_m{m}"] = float(abs(s3 + res3 + 2.0 * phi_q0(config) / (y0 - um)))

        wrep = w_form_at_branch(config, pdata, km)
        plane4 = lambda u: (om.rep.numer_at(u) / (u - y0)) * (
            wrep.numer_at(u) / (u - um)
        ) / model.delta(u)
        res4 = residue_at_branch(plane4, um, zr, 256)
        s4 = 0.5 * sum(
            om_at[j] * rep_eval_branch(wrep, j)
            for j in range(len(pts))
            if pts[j] != um
        )
        w_q0 = (wrep.numer_at(y0) / (y0 - um)) * (-1.0 / complex(model.sqrt(y0)))
        out[f"res4_m{m}"] = float(abs(s4 + res4 + 2.0 * w_q0))
    return out
