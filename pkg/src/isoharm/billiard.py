"""Billiards inside an ellipsoid with confocal caustics.

The confocal family is x_1^2/(b_1 - l) + ... + x_d^2/(b_d - l) = 1; a
trajectory inside the b-ellipsoid (l = 0) stays tangent to d-1 confocal
caustics, and the sorted roots l_1 < ... < l_d through a point are its
Jacobi coordinates.  The bridge to interval systems inverts the parameters:
with e_1 < ... < e_{2d-1} the merged {b, alpha} values, the support is
[0, 1/e_{2d-1}] u ... u [1/e_2, 1/e_1], independent endpoints are the
reciprocal semi-axes and dependent ones the reciprocal caustic parameters.

Winding numbers are counted as full oscillations of each Jacobi coordinate
over one period (number of its local maxima along the closed trajectory),
which resolves the half-turn boundary ambiguity deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import ConfigError, IntervalSystem, moebius_normalize
from .deform import ConvergenceError, integrate_path
from .measures import frequency_map
from .pell import chebyshev_poly, detect_regular
from .periods import DEFAULT_NODES

TANGENCY_TOL = 1e-10
CONSERVATION_TOL = 1e-7

P = np.polynomial.polynomial


class ConservationError(RuntimeError):
    pass


@dataclass(frozen=True)
class BilliardConfig:
    """Squared semi-axes b (ascending) and caustic parameters alpha.

    The merged ordering e_1 < ... < e_{2d-1} must interlace so that
    alpha_j is one of {e_{2j-1}, e_{2j}} and the largest value is b_d.
    """

    b: tuple[float, ...]
    alpha: tuple[float, ...]

    def __post_init__(self):
        b = tuple(float(v) for v in self.b)
        alpha = tuple(float(v) for v in self.alpha)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "alpha", alpha)
        violations = []
        if len(alpha) != len(b) - 1:
            violations.append("need d-1 caustic parameters for d semi-axes")
        if any(v <= 0 for v in b):
            violations.append("squared semi-axes must be positive")
        if sorted(b) != list(b) or sorted(alpha) != list(alpha):
            violations.append("b and alpha must be ascending")
        merged = sorted(b + alpha)
        if merged[-1] != b[-1]:
            violations.append("largest confocal value must be b_d")
        for j, a in enumerate(alpha, start=1):
            if a not in (merged[2 * j - 2], merged[2 * j - 1]):
                violations.append(
                    f"alpha_{j} = {a} violates the interlacing of the confocal values"
                )
        if violations:
            raise ConfigError(violations)

    @property
    def d(self) -> int:
        return len(self.b)

    @property
    def merged(self) -> tuple[float, ...]:
        return tuple(sorted(self.b + self.alpha))

    def to_dict(self) -> dict:
        return {"b": list(self.b), "alpha": list(self.alpha)}

    @classmethod
    def from_dict(cls, data: dict) -> "BilliardConfig":
        return cls(tuple(sorted(data["b"])), tuple(sorted(data["alpha"])))


@dataclass(frozen=True)
class Trajectory:
    """Bounce points, unit directions, turning bookkeeping, diagnostics.

    turning_events counts all extrema of each Jacobi coordinate over the
    run (a full oscillation contributes two); winding counts the maxima.
    """

    points: np.ndarray
    directions: np.ndarray
    winding: tuple[int, ...]
    turning_events: tuple[int, ...]
    closure_gap: float
    tangency_drift: float

    @property
    def n_bounces(self) -> int:
        return len(self.points) - 1


# ---------------------------------------------------------------------------
# Jacobi coordinates and tangency


def jacobi_coords(point, b) -> np.ndarray:
    """The d confocal parameters through a point, ascending.

    Roots of sum x_i^2 / (b_i - l) = 1 cleared of denominators; each root is
    polished with one Newton step and validated by back-substitution.
    """
    x = np.asarray(point, dtype=float)
    b = np.asarray(b, dtype=float)
    d = len(b)
    poly = np.zeros(d + 1)
    full = np.array([1.0])
    for bi in b:
        full = P.polymul(full, np.array([bi, -1.0]))
    poly = -full
    for i in range(d):
        part = np.array([x[i] ** 2])
        for j in range(d):
            if j != i:
                part = P.polymul(part, np.array([b[j], -1.0]))
        poly = P.polyadd(poly, part)
    roots = np.roots(poly[::-1])
    lam = roots.real.copy()
    # polish on the cleared polynomial: robust at hyperplane roots, where
    # the rational form loses its factor and Newton on it would diverge
    dpoly = P.polyder(poly)
    for _ in range(3):
        pv = P.polyval(lam, poly)
        dv = P.polyval(lam, dpoly)
        lam = lam - pv / np.where(np.abs(dv) > 1e-300, dv, 1.0)
    lam = np.sort(lam)
    # back-substitution self-check in the cleared form
    scale = np.abs(poly).max() * (1.0 + np.abs(lam)) ** d
    resid = np.abs(P.polyval(lam, poly))
    if np.any(resid > 1e-10 * scale):
        raise ConservationError(
            f"Jacobi back-substitution residual {np.max(resid / scale):.3e}"
        )
    return lam


def tangency_defect(p, w, b, alpha: float) -> float:
    """Discriminant of the line-quadric intersection; zero at tangency."""
    p = np.asarray(p, float)
    w = np.asarray(w, float)
    den = np.asarray(b, float) - alpha
    A = np.sum(w**2 / den)
    B = 2.0 * np.sum(p * w / den)
    C = np.sum(p**2 / den) - 1.0
    return B * B - 4.0 * A * C


def _next_bounce(p, w, b):
    """Second intersection of the ray with the ellipsoid (s = 0 is p itself)."""
    den = np.asarray(b, float)
    A = np.sum(w**2 / den)
    B = 2.0 * np.sum(p * w / den)
    s = -B / A
    if s <= 0:
        raise ConservationError("ray does not re-enter the ellipsoid")
    return p + s * w, s


def tangent_direction(config: BilliardConfig, p, seed: int = 0) -> np.ndarray:
    """Inward unit direction at p tangent to all caustics (Newton-projected)."""
    b = np.asarray(config.b)
    d = config.d
    rng = np.random.default_rng(seed)
    for attempt in range(64):
        w = rng.standard_normal(d)
        w /= np.linalg.norm(w)

        def F(v):
            out = [tangency_defect(p, v, b, a) for a in config.alpha]
            out.append(np.dot(v, v) - 1.0)
            return np.array(out)

        ok = True
        for _ in range(80):
            r = F(w)
            if np.max(np.abs(r)) < 1e-13:
                break
            J = np.empty((d, d))
            h = 1e-7
            for j in range(d):
                wp = w.copy()
                wp[j] += h
                J[:, j] = (F(wp) - r) / h
            try:
                step = np.linalg.solve(J, -r)
            except np.linalg.LinAlgError:
                ok = False
                break
            if np.linalg.norm(step) > 1.0:
                step *= 1.0 / np.linalg.norm(step)
            w = w + step
        else:
            ok = False
        if not ok or np.max(np.abs(F(w))) > 1e-12:
            continue
        n_out = p / b
        if np.dot(w, n_out) > 0:
            w = -w
        return w
    raise ConservationError("no tangent direction found from the seeded starts")


def _on_ellipsoid_point(config: BilliardConfig, seed: int = 0) -> np.ndarray:
    """A point of the boundary inside the admissible belt of the caustics."""
    b = np.asarray(config.b)
    rng = np.random.default_rng(seed)
    for _ in range(256):
        v = rng.standard_normal(config.d)
        p = v / np.sqrt(np.sum(v**2 / b))
        try:
            lam = jacobi_coords(p, b)
        except ConservationError:
            continue
        if abs(lam[0]) > 1e-9:
            continue
        try:
            tangent_direction(config, p, seed)
        except ConservationError:
            continue
        return p
    raise ConservationError("no admissible starting point found")


def simulate(
    config: BilliardConfig,
    start=None,
    n_bounces: int = 10,
    samples_per_segment: int = 400,
    seed: int = 0,
) -> Trajectory:
    """Straight segments plus specular reflection; Jacobi coordinates sampled
    along every segment for the winding bookkeeping.

    ``start`` is an optional (point, direction) pair; by default a seeded
    admissible start tangent to all caustics is constructed.
    """
    b = np.asarray(config.b)
    if start is None:
        p0 = _on_ellipsoid_point(config, seed)
        w0 = tangent_direction(config, p0, seed)
    else:
        p0, w0 = np.asarray(start[0], float), np.asarray(start[1], float)
    for a in config.alpha:
        if abs(tangency_defect(p0, w0, b, a)) > TANGENCY_TOL:
            raise ConservationError("start direction is not tangent to the caustics")

    pts = [p0]
    dirs = [w0]
    lam_samples: list[np.ndarray] = []
    drift = 0.0
    p, w = p0, w0
    for _ in range(n_bounces):
        q, s_len = _next_bounce(p, w, b)
        ts = np.linspace(0.0, s_len, samples_per_segment, endpoint=False)
        for t in ts:
            lam_samples.append(jacobi_coords(p + t * w, b))
        for a in config.alpha:
            drift = max(drift, abs(tangency_defect(p, w, b, a)))
        p = q
        w = _reflect_at(p, w, b)
        pts.append(p)
        dirs.append(w)
        if drift > CONSERVATION_TOL:
            raise ConservationError(f"caustic tangency drift {drift:.3e}")
    lam = np.array(lam_samples)
    winding = tuple(_count_oscillations(lam[:, i]) for i in range(config.d))
    closure = float(
        np.linalg.norm(pts[-1] - pts[0]) + np.linalg.norm(dirs[-1] - dirs[0])
    )
    return Trajectory(np.array(pts), np.array(dirs), winding, closure, drift)


def _reflect_at(p, w, b):
    n = p / np.asarray(b)
    n = n / np.linalg.norm(n)
    return w - 2.0 * np.dot(w, n) * n


def _count_oscillations(series: np.ndarray) -> int:
    """Local maxima of a cyclic sampled signal (one per full oscillation)."""
    n = len(series)
    nxt = np.roll(series, -1)
    prv = np.roll(series, 1)
    peaks = (series > prv) & (series >= nxt)
    return int(np.sum(peaks))


# ---------------------------------------------------------------------------
# bridge to interval systems


def intervals_from_billiard(config: BilliardConfig):
    """(IntervalSystem, sigma_hat): support of reciprocals with c_2d = 0.

    sigma_hat entry 'l' means the independent endpoint (a reciprocal squared
    semi-axis) sits on the left of its interval; the last entry must be 'l'
    for the normalization to send a dependent endpoint to infinity, which
    holds exactly when alpha_1 = e_1.
    """
    e = config.merged
    d = config.d
    c = sorted([1.0 / v for v in e], reverse=True) + [0.0]
    E = IntervalSystem(tuple(c))
    sigma_hat = []
    bset = set(config.b)
    for k in range(2, d + 1):
        j = d + 1 - k  # confocal pair index for the k-th interval from the left
        lo_e, hi_e = e[2 * j - 2], e[2 * j - 1]
        # interval endpoints are 1/hi_e (left) and 1/lo_e (right)
        sigma_hat.append("l" if hi_e in bset else "r")
    return E, tuple(sigma_hat)


def billiard_from_intervals(E: IntervalSystem, sigma_hat) -> BilliardConfig:
    """Inverse of intervals_from_billiard for supports with c_2d = 0."""
    if E.endpoints[-1] != 0.0:
        raise ConfigError(["support must have 0 as its leftmost endpoint"])
    e = sorted(1.0 / c for c in E.endpoints[:-1])
    d = E.d
    b = [e[-1]]
    alpha = []
    for j in range(1, d):
        lo_e, hi_e = e[2 * j - 2], e[2 * j - 1]
        k = d + 1 - j  # interval index from the left
        s = sigma_hat[k - 2]
        if s == "l":
            b.append(hi_e)
            alpha.append(lo_e)
        else:
            b.append(lo_e)
            alpha.append(hi_e)
    return BilliardConfig(tuple(sorted(b)), tuple(sorted(alpha)))


def deform_billiard(
    config: BilliardConfig,
    b_new,
    steps: int = 5,
    node_count: int = DEFAULT_NODES,
) -> tuple[list[BilliardConfig], dict]:
    """Deform the semi-axes b_1..b_{d-1} holding the winding data.

    Maps to the reciprocal interval system (scaled so the fixed interval is
    [0, 1]), runs the isoequilibrium engine at fixed frequencies, and maps
    every snapshot back to caustic parameters; each returned configuration is
    re-certified by the Pell machinery at the detected degree.
    """
    E, sigma_hat = intervals_from_billiard(config)
    scale = E.bands[0][1]  # = 1/b_d
    Eh = IntervalSystem(tuple(c / scale for c in E.endpoints))
    cfg0, _ = moebius_normalize(Eh, sigma_hat)

    b_new = np.asarray(b_new, dtype=float)
    if len(b_new) != config.d - 1:
        raise ConfigError(["vary exactly the d-1 smaller semi-axes"])
    if abs(config.b[-1] - 1.0 / (E.bands[0][1])) > 1e-9 * config.b[-1]:
        raise ConfigError(["internal reciprocal bookkeeping failed"])
    # independent hat endpoints are the scaled reciprocals of b_1..b_{d-1},
    # ordered like the movable intervals (left to right = descending b)
    x_hat_end = np.array([1.0 / bv / scale for bv in b_new[::-1]])

    f0 = frequency_map(Eh, node_count)
    reg = detect_regular(f0)
    diagnostic = None
    try:
        path = integrate_path(cfg0, x_hat_end, steps, policy="equilibrium",
                              node_count=node_count)
    except ConvergenceError as exc:
        if exc.partial is None:
            raise
        path = exc.partial
        diagnostic = str(exc)
    out = []
    residuals = []
    for hat in path.hat_systems:
        E_i = IntervalSystem(tuple(c * scale for c in hat.endpoints))
        out.append(billiard_from_intervals(E_i, sigma_hat))
        if reg is not None:
            cert = chebyshev_poly(
                IntervalSystem(tuple(hat.endpoints)), reg[0], node_count
            )
            residuals.append(cert.residual)
    report = {
        "regular": reg,
        "pell_residuals": residuals,
        "frequency_drift": path.max_drift(),
        "diagnostic": diagnostic,
    }
    return out, report
