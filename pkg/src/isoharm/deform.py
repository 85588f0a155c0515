"""Isoharmonic deformation engine: Newton inversion, closed-form derivatives,
and predictor-corrector continuation.

Two coordinate policies are supported.  "equilibrium" works in the original
(hat) coordinates with the pole pinned at infinity: the unknowns are the g
dependent endpoints of the interval system and the targets are the
equilibrium frequencies.  "harmonic" works on the normalized model: the
unknowns are (u_1..u_{g-1}, y0) and the targets are the partial sums of the
harmonic measures over the first g bands.  The two agree through the Moebius
map because harmonic measures are conformal invariants.

The corrector deliberately uses a finite-difference Jacobian so that it stays
independent of the closed-form derivative formulas it is later used to test;
the analytic derivatives only drive the Euler predictor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curve import (
    ConfigError,
    IntervalSystem,
    TCurveConfig,
    hat_system,
    moebius_normalize,
    phi_q0,
    validate_config,
)
from .measures import (
    FrequencyVector,
    frequency_map,
    harmonic_partial_sums,
)
from .periods import (
    DEFAULT_NODES,
    a12_values,
    omega_third_kind,
    rep_eval_branch,
    v_basis,
)

NEWTON_TOL = 1e-11
MAX_NEWTON = 50
CROSS_CHECK_TOL = 1e-9


class RegionError(RuntimeError):
    """Newton iterate left the admissible region."""


class ConvergenceError(RuntimeError):
    """Newton failed to reach tolerance.

    When raised by the path integrator, ``partial`` carries the
    DeformationPath of the accepted snapshots up to the failure.
    """

    def __init__(self, msg: str, partial=None):
        super().__init__(msg)
        self.partial = partial


class SingularityError(RuntimeError):
    """A formula denominator (A12 at a dependent point) vanished."""


@dataclass(frozen=True)
class DeformationPath:
    """Snapshots of an integrated deformation with per-step drift log."""

    configs: tuple[TCurveConfig, ...]
    hat_systems: tuple[IntervalSystem, ...]
    target: tuple[float, ...]
    drift: tuple[float, ...]
    policy: str

    def max_drift(self) -> float:
        return max(self.drift) if self.drift else 0.0


# ---------------------------------------------------------------------------
# damped Newton with FD Jacobian


def _newton(
    residual: Callable[[np.ndarray], np.ndarray],
    guess: np.ndarray,
    region_ok: Callable[[np.ndarray], bool],
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_NEWTON,
) -> tuple[np.ndarray, int]:
    w = np.asarray(guess, dtype=float).copy()
    if not region_ok(w):
        raise RegionError(f"initial guess outside admissible region: {w}")
    r = residual(w)
    for it in range(1, max_iter + 1):
        if np.max(np.abs(r)) <= tol:
            return w, it - 1
        n = w.size
        J = np.empty((n, n))
        for j in range(n):
            h = 1e-7 * max(1.0, abs(w[j]))
            wp = w.copy()
            wp[j] += h
            if not region_ok(wp):
                wp[j] = w[j] - h
                h = -h
            J[:, j] = (residual(wp) - r) / h
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular FD Jacobian: {exc}") from exc
        lam = 1.0
        for _ in range(30):
            trial = w + lam * step
            if region_ok(trial):
                r_trial = residual(trial)
                if np.max(np.abs(r_trial)) < np.max(np.abs(r)) or lam < 1e-3:
                    w, r = trial, r_trial
                    break
            lam /= 2.0
        else:
            raise RegionError("damping exhausted: iterate pinned at region boundary")
    if np.max(np.abs(r)) <= tol:
        return w, max_iter
    raise ConvergenceError(
        f"no convergence in {max_iter} iterations; residual {np.max(np.abs(r)):.3e}"
    )


# ---------------------------------------------------------------------------
# frequency inversion


def _hat_region_ok(x_hat, sigma_hat) -> Callable[[np.ndarray], bool]:
    """Admissibility: valid disjoint intervals AND preserved endpoint types.

    The orientation guard stops Newton from leaping across a band collision
    into the mirrored solution branch (dependent and independent endpoints
    swapped), which satisfies the frequency equations but breaks the sigma
    bookkeeping of the family.
    """

    def ok(u_hat: np.ndarray) -> bool:
        for xh, uh, s in zip(x_hat, u_hat, sigma_hat):
            if s == "l" and not uh > xh:
                return False
            if s == "r" and not uh < xh:
                return False
        try:
            hat_system(x_hat, u_hat, sigma_hat)
        except ConfigError:
            return False
        return True

    return ok


def _config_with(config: TCurveConfig, u: np.ndarray, y0: float) -> TCurveConfig:
    return validate_config(
        x=config.x,
        u=tuple(u),
        y0=y0,
        sigma=config.sigma,
        c_hat1=config.c_hat1,
        c_hat2=config.c_hat2,
        t=config.t,
    )


def _harmonic_region_ok(config: TCurveConfig) -> Callable[[np.ndarray], bool]:
    lo_y0 = -math.inf if config.y0 < 0 else max(
        p for p in config.branch_points if p < config.y0
    )
    hi_y0 = 0.0 if config.y0 < 0 else min(
        p for p in config.branch_points if p > config.y0
    )

    def ok(w: np.ndarray) -> bool:
        u, y0 = w[:-1], w[-1]
        if not lo_y0 < y0 < hi_y0:
            return False
        try:
            _config_with(config, u, y0)
        except ConfigError:
            return False
        return True

    return ok


def invert_frequencies(
    fixed: dict,
    target,
    guess,
    node_count: int = DEFAULT_NODES,
    tol: float = NEWTON_TOL,
) -> np.ndarray:
    """Newton-invert the frequency map at fixed independent data.

    fixed = {"x": independents, "sigma": endpoint types, "y0": policy} where
    the policy is "pinned-infinity" (equilibrium mode: guess and result are
    the g dependent hat endpoints) or "free" (harmonic mode: guess and result
    are (u_1..u_{g-1}, y0) on the normalized model; fixed["config"] supplies
    the template).  Targets are the matching partial-sum frequencies.
    """
    target = np.asarray(
        target.values if isinstance(target, FrequencyVector) else target, dtype=float
    )
    policy = fixed.get("y0", "pinned-infinity")
    if policy == "pinned-infinity":
        x_hat = tuple(fixed["x"])
        sigma_hat = tuple(fixed["sigma"])

        def residual(u_hat):
            E = hat_system(x_hat, u_hat, sigma_hat)
            return np.asarray(frequency_map(E, node_count).values) - target

        sol, _ = _newton(residual, np.asarray(guess, float), _hat_region_ok(x_hat, sigma_hat), tol)
        return sol
    if policy == "free":
        template: TCurveConfig = fixed["config"]

        def residual(w):
            cfg = _config_with(template, w[:-1], w[-1])
            return harmonic_partial_sums(cfg, node_count) - target

        sol, _ = _newton(residual, np.asarray(guess, float), _harmonic_region_ok(template), tol)
        return sol
    raise ValueError(f"unknown y0 policy {policy!r}")


def solve_harmonic_config(
    config: TCurveConfig,
    target,
    node_count: int = DEFAULT_NODES,
    tol: float = NEWTON_TOL,
) -> tuple[TCurveConfig, int]:
    """Re-solve (u, y0) of a config so its harmonic partial sums hit target."""
    target = np.asarray(target, dtype=float)

    def residual(w):
        cfg = _config_with(config, w[:-1], w[-1])
        return harmonic_partial_sums(cfg, node_count) - target

    guess = np.array(list(config.u) + [config.y0])
    sol, iters = _newton(residual, guess, _harmonic_region_ok(config), tol)
    return _config_with(config, sol[:-1], sol[-1]), iters


# ---------------------------------------------------------------------------
# closed-form derivatives of the dependent data


def dependent_derivatives(
    config: TCurveConfig, node_count: int = DEFAULT_NODES
) -> tuple[np.ndarray, np.ndarray]:
    """(du/dx, dy0/dx) for the isoharmonic family through config.

    Returned values come from the residue-matrix form; they are cross-checked
    internally against the equivalent form in terms of Omega and the v-basis
    (agreement to 1e-9 required, else SingularityError/ArithmeticError).
    """
    g = config.g
    y0 = config.y0
    om = omega_third_kind(config, node_count)
    a12 = a12_values(config, om)
    pts = config.branch_points
    ix = [pts.index(v) for v in config.x]
    iu = [pts.index(v) for v in config.u]
    for m, k in enumerate(iu):
        if abs(a12[k]) < 1e-13 * max(1.0, np.abs(a12).max()):
            raise SingularityError(f"A12 vanishes at dependent point u_{m + 1}")

    du = np.empty((g - 1, g), dtype=complex)
    dy0 = np.empty(g, dtype=complex)
    us = np.array(config.u)
    for i, xi in enumerate(config.x):
        for m, um in enumerate(config.u):
            others = [a for a in range(len(us)) if a != m]
            num = (um - y0) ** (g - 1) * np.prod(xi - us[others])
            den = (xi - y0) ** (g - 1) * np.prod(um - us[others])
            du[m, i] = -(a12[ix[i]] / a12[iu[m]]) * num / den
        dy0[i] = -(a12[ix[i]] / config.t) * np.prod(xi - us) / (
            phi_q0(config) * (xi - y0) ** g * np.prod(y0 - us)
        )

    # cross-check against (umder_g)/(y0der_g)
    vs = v_basis(config)
    for i in range(g):
        om_xi = rep_eval_branch(om.rep, ix[i])
        alt_y = -0.25 * om_xi * rep_eval_branch(vs[-1], ix[i])
        if abs(alt_y - dy0[i]) > CROSS_CHECK_TOL * max(1.0, abs(dy0[i])):
            raise ArithmeticError(
                f"dy0 cross-check failed in direction {i}: {dy0[i]} vs {alt_y}"
            )
        for m in range(g - 1):
            om_um = rep_eval_branch(om.rep, iu[m])
            alt = -(om_xi / om_um) * rep_eval_branch(vs[m], ix[i])
            if abs(alt - du[m, i]) > CROSS_CHECK_TOL * max(1.0, abs(du[m, i])):
                raise ArithmeticError(
                    f"du cross-check failed at (m={m}, i={i}): {du[m, i]} vs {alt}"
                )
    imag = max(np.abs(du.imag).max() if du.size else 0.0, np.abs(dy0.imag).max())
    if imag > 1e-9 * max(1.0, np.abs(du.real).max() if du.size else 0.0):
        raise ArithmeticError(f"derivatives acquired imaginary parts: {imag:.3e}")
    return du.real, dy0.real


def dy0_split_form(
    config: TCurveConfig, du: np.ndarray, node_count: int = DEFAULT_NODES
) -> np.ndarray:
    """dy0/dx via the split form that isolates the du/dx contributions."""
    om = omega_third_kind(config, node_count)
    a12 = a12_values(config, om)
    pts = config.branch_points
    g, y0, t = config.g, config.y0, config.t
    phi0 = phi_q0(config)
    out = np.empty(g, dtype=complex)
    for i, xi in enumerate(config.x):
        val = -a12[pts.index(xi)] / (t * phi0 * (xi - y0) ** g)
        for al, ua in enumerate(config.u):
            val -= a12[pts.index(ua)] / (t * phi0 * (ua - y0) ** g) * du[al, i]
        out[i] = val
    return out.real


# ---------------------------------------------------------------------------
# path continuation


def integrate_path(
    config: TCurveConfig,
    x_end,
    steps: int,
    policy: str = "harmonic",
    node_count: int = DEFAULT_NODES,
    drift_tol: float = 1e-10,
) -> DeformationPath:
    """Predictor-corrector continuation along a straight path of independents.

    policy "harmonic": x_end is a normalized-model x target; the Euler
    predictor uses (umder_A)/(dy0) and the corrector re-solves (u, y0) at
    fixed harmonic partial sums.  policy "equilibrium": x_end is a target for
    the hat-coordinate independents (pole pinned at infinity); the predictor
    is the Chebyshev-dynamics matrix and the corrector re-solves the hat
    dependents at fixed equilibrium frequencies.

    A step is halved whenever the corrector needs more than 8 Newton
    iterations; per-step drift is the sup-norm frequency defect of the
    accepted snapshot.
    """
    if policy not in ("harmonic", "equilibrium"):
        raise ValueError(f"unknown policy {policy!r}")
    x_end = np.asarray(x_end, dtype=float)
    hat0, sigma_hat = _denormalize(config)
    if policy == "harmonic":
        target = harmonic_partial_sums(config, node_count)
        state = np.asarray(config.x, dtype=float)
    else:
        target = np.asarray(frequency_map(hat0, node_count).values)
        state = np.array(
            [b[0] if s == "l" else b[1] for b, s in zip(hat0.bands[1:], sigma_hat)]
        )

    configs = [config]
    hats = [hat0]
    drift: list[float] = []
    x0 = state.copy()
    s, ds = 0.0, 1.0 / max(steps, 1)
    current = config
    while s < 1.0 - 1e-12:
        ds_try = min(ds, 1.0 - s)
        ok = False
        for _ in range(12):
            x_next = x0 + (s + ds_try) * (x_end - x0)
            try:
                if policy == "harmonic":
                    nxt, iters = _advance_harmonic(current, x_next, target, node_count)
                else:
                    nxt, iters = _advance_equilibrium(
                        current, sigma_hat, x_next, target, node_count
                    )
            except (RegionError, ConvergenceError, ConfigError):
                ds_try /= 2.0
                continue
            if iters > 8:
                ds_try /= 2.0
                continue
            ok = True
            break
        if not ok:
            raise ConvergenceError(
                f"corrector failed near path parameter s = {s:.4f}",
                partial=DeformationPath(
                    tuple(configs), tuple(hats), tuple(target), tuple(drift), policy
                ),
            )
        s += ds_try
        current = nxt
        configs.append(current)
        hats.append(_denormalize(current)[0])
        if policy == "harmonic":
            res = harmonic_partial_sums(current, node_count) - target
        else:
            res = np.asarray(frequency_map(hats[-1], node_count).values) - target
        drift.append(float(np.max(np.abs(res))))
        if drift[-1] > drift_tol:
            raise ConvergenceError(f"drift {drift[-1]:.3e} above {drift_tol}")
    return DeformationPath(
        tuple(configs), tuple(hats), tuple(target), tuple(drift), policy
    )


def _denormalize(config: TCurveConfig):
    from .curve import moebius_denormalize

    return moebius_denormalize(config)


def _advance_harmonic(
    current: TCurveConfig, x_next: np.ndarray, target: np.ndarray, node_count: int
) -> tuple[TCurveConfig, int]:
    dx = x_next - np.asarray(current.x)
    if np.max(np.abs(dx)) == 0.0:
        return current, 0
    du, dy0 = dependent_derivatives(current, node_count)
    u_pred = np.asarray(current.u) + du @ dx
    y0_pred = current.y0 + float(dy0 @ dx)
    template = validate_config(
        x=tuple(x_next),
        u=tuple(u_pred),
        y0=y0_pred,
        sigma=current.sigma,
        c_hat1=current.c_hat1,
        c_hat2=current.c_hat2,
        t=current.t,
    )
    return solve_harmonic_config(template, target, node_count)


def _advance_equilibrium(
    current: TCurveConfig,
    sigma_hat,
    x_hat_next: np.ndarray,
    target: np.ndarray,
    node_count: int,
) -> tuple[TCurveConfig, int]:
    hat, _ = _denormalize(current)
    x_hat = np.array(
        [b[0] if s == "l" else b[1] for b, s in zip(hat.bands[1:], sigma_hat)]
    )
    u_hat = np.array(
        [b[1] if s == "l" else b[0] for b, s in zip(hat.bands[1:], sigma_hat)]
    )
    dx = x_hat_next - x_hat
    if np.max(np.abs(dx)) == 0.0:
        return current, 0
    W = chebyshev_dynamics(current, node_count)
    u_pred = u_hat + W @ dx

    def residual(uh):
        E = hat_system(x_hat_next, uh, sigma_hat)
        return np.asarray(frequency_map(E, node_count).values) - target

    sol, iters = _newton(residual, u_pred, _hat_region_ok(x_hat_next, sigma_hat))
    E = hat_system(x_hat_next, sol, sigma_hat)
    cfg, _ = moebius_normalize(E, sigma_hat)
    cfg = validate_config(
        x=cfg.x, u=cfg.u, y0=cfg.y0, sigma=cfg.sigma,
        c_hat1=current.c_hat1, c_hat2=current.c_hat2, t=current.t,
    )
    return cfg, iters


# ---------------------------------------------------------------------------
# Chebyshev dynamics in original coordinates


def chebyshev_dynamics(
    config: TCurveConfig, node_count: int = DEFAULT_NODES
) -> np.ndarray:
    """Matrix W[j, k] = d u_hat_j / d x_hat_k in original coordinates.

    Rows j = 1..g-1 are the finite dependent endpoints; row g is
    u_hat_g = 1 - y0.  Solves the two linear systems of the inverse-Moebius
    chain rule from the normalized-model derivatives.
    """
    g = config.g
    du, dy0 = dependent_derivatives(config, node_count)
    y0 = config.y0
    us, xs = np.asarray(config.u), np.asarray(config.x)

    # d x_hat_k / d x_i
    M = np.empty((g, g))
    for k in range(g):
        xk = xs[k]
        Ck = -y0 * (1.0 - y0) / (xk - y0) ** 2
        Dk = xk * (1.0 - xk) / (xk - y0) ** 2
        for i in range(g):
            M[i, k] = Ck * (1.0 if i == k else 0.0) + Dk * dy0[i]
    if abs(np.linalg.det(M)) < 1e-300:
        raise ArithmeticError("singular Jacobian d x_hat / d x in the chain rule")

    W = np.empty((g, g))
    for j in range(g - 1):
        uj = us[j]
        Aj = -y0 * (1.0 - y0) / (uj - y0) ** 2
        Bj = uj * (1.0 - uj) / (uj - y0) ** 2
        rhs = Aj * du[j, :] + Bj * dy0
        W[j, :] = np.linalg.solve(M, rhs)
    W[g - 1, :] = np.linalg.solve(M, -dy0)
    return W
