"""Branch-point data for real hyperelliptic curves over interval systems.

Two models of the same geometry are used throughout the package:

* the even-degree model  mu^2 = prod_{j=1}^{2d} (z - c_j)  attached to a
  bounded interval system E = [c_{2d}, c_{2d-1}] u ... u [c_2, c_1], and
* the odd-degree normalized model  v^2 = u(u-1) prod(u - x_j) prod(u - u_k)
  whose last band is [x_g, inf), obtained from the even model by the Moebius
  map fixing {0, 1} and sending the dependent rightmost endpoint to infinity.

The single global branch convention lives here.  Square roots are cut along
the bands; a value quoted on a cut means the limit from the upper half-plane;
the value is positive real for real z above all finite branch points (for the
odd model: the upper-edge limit on the unbounded band).  Every other module
inherits this convention, which keeps period and residue computations from
drifting in sign relative to each other.

Conjugation symmetry holds for the even model, sqrt(conj z) = conj(sqrt z).
For the odd model the unbounded cut forces the anti-symmetric variant
sqrt(conj z) = -conj(sqrt z); no cut placement on the bands can avoid this
because the square of the root is negative on real gap points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

Side = Literal["l", "r"]

# Relative gap width below which two branch points count as collided.
COLLISION_RTOL = 1e-9


class ConfigError(ValueError):
    """Branch data violating model invariants; carries the full list."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class PoleOnContourError(ValueError):
    pass


class ConditioningError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# square-root machinery shared by both models


@dataclass(frozen=True)
class BranchModel:
    """Finite branch points plus the band (cut) structure they bound.

    ``bands`` are ascending; the last band may be unbounded (hi = inf), in
    which case the branch-point count is odd.
    """

    branch_points: tuple[float, ...]
    bands: tuple[tuple[float, float], ...]

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.bands[-1][1])

    @property
    def gaps(self) -> tuple[tuple[float, float], ...]:
        return tuple(
            (self.bands[j][1], self.bands[j + 1][0]) for j in range(len(self.bands) - 1)
        )

    def sqrt(self, z):
        """Branch of sqrt(prod (z - a_j)) cut along the bands.

        Vectorized; real arguments are treated as limits from the upper
        half-plane (numpy's +0j convention does this for free).
        """
        z = np.asarray(z, dtype=complex)
        val = np.ones_like(z)
        for lo, hi in self.bands:
            if math.isinf(hi):
                tail = 1j * np.sqrt(lo - z)
                # real z on the cut: signed zeros cannot carry the upper-edge
                # limit through the subtraction, so set it explicitly
                on_cut = (z.imag == 0) & (z.real >= lo)
                if np.any(on_cut):
                    upper = np.sqrt(np.maximum(z.real - lo, 0.0)).astype(complex)
                    tail = np.where(on_cut, upper, tail)
                val = val * tail
            else:
                val = val * (np.sqrt(z - lo) * np.sqrt(z - hi))
        return val

    def delta(self, z):
        z = np.asarray(z, dtype=complex)
        val = np.ones_like(z)
        for a in self.branch_points:
            val = val * (z - a)
        return val

    def sqrt_excluding(self, z, a: float):
        """sqrt(Delta) with the formal factor csqrt(z - a) divided out.

        Valid in the closed upper half-plane, where the cut placement of the
        unbounded band agrees with the principal csqrt(z - a).  Used by the
        endpoint-substituted quadratures, which supply the exact root of the
        excluded factor themselves (avoiding the z - a cancellation for
        nodes exponentially close to a).
        """
        z = np.asarray(z, dtype=complex)
        val = np.ones_like(z)
        for lo, hi in self.bands:
            if math.isinf(hi):
                if a == lo:
                    continue
                tail = 1j * np.sqrt(lo - z)
                on_cut = (z.imag == 0) & (z.real >= lo)
                if np.any(on_cut):
                    upper = np.sqrt(np.maximum(z.real - lo, 0.0)).astype(complex)
                    tail = np.where(on_cut, upper, tail)
                val = val * tail
            elif a == lo:
                val = val * np.sqrt(z - hi)
            elif a == hi:
                val = val * np.sqrt(z - lo)
            else:
                val = val * (np.sqrt(z - lo) * np.sqrt(z - hi))
        return val

    def locate(self, z: float) -> str:
        """Classify a real point: 'band', 'gap', or 'outside'."""
        for lo, hi in self.bands:
            if lo <= z <= hi:
                return "band"
        for lo, hi in self.gaps:
            if lo < z < hi:
                return "gap"
        return "outside"


# ---------------------------------------------------------------------------
# interval systems (even-degree model)


@dataclass(frozen=True)
class IntervalSystem:
    """Union of d pairwise disjoint closed intervals, endpoints descending.

    ``endpoints`` stores c_1 > c_2 > ... > c_{2d}; bands are reported in
    ascending (left to right) order since that is the order quadratures and
    measures are accumulated in.
    """

    endpoints: tuple[float, ...]

    def __post_init__(self):
        eps = tuple(float(c) for c in self.endpoints)
        object.__setattr__(self, "endpoints", eps)
        violations = []
        if len(eps) < 2 or len(eps) % 2:
            violations.append("endpoint count must be even and >= 2")
        else:
            scale = max(abs(c) for c in eps) or 1.0
            for a, b in zip(eps, eps[1:]):
                if b >= a:
                    violations.append(f"endpoints not strictly decreasing at {a}, {b}")
                elif a - b < COLLISION_RTOL * scale:
                    violations.append(f"near-collision of endpoints {a}, {b}")
        if violations:
            raise ConfigError(violations)

    @property
    def d(self) -> int:
        return len(self.endpoints) // 2

    @property
    def bands(self) -> tuple[tuple[float, float], ...]:
        """Ascending: bands[0] = [c_2d, c_2d-1] is the leftmost interval."""
        e = self.endpoints[::-1]
        return tuple((e[2 * k], e[2 * k + 1]) for k in range(self.d))

    @property
    def gaps(self) -> tuple[tuple[float, float], ...]:
        b = self.bands
        return tuple((b[k][1], b[k + 1][0]) for k in range(self.d - 1))

    @property
    def hull(self) -> tuple[float, float]:
        return self.endpoints[-1], self.endpoints[0]

    def model(self) -> BranchModel:
        return BranchModel(tuple(sorted(self.endpoints)), self.bands)

    @classmethod
    def from_bands(cls, bands) -> "IntervalSystem":
        eps = sorted([c for band in bands for c in band], reverse=True)
        return cls(tuple(eps))

    def to_dict(self) -> dict:
        return {"endpoints": list(self.endpoints)}

    @classmethod
    def from_dict(cls, data: dict) -> "IntervalSystem":
        return cls(tuple(sorted(data["endpoints"], reverse=True)))


# ---------------------------------------------------------------------------
# normalized odd-degree model


@dataclass(frozen=True)
class TCurveConfig:
    """Normalized branch data {0, 1, x_1..x_g, u_1..u_{g-1}} with pole y0.

    sigma[j] = 'l' means the independent point x_{j+1} is the left endpoint
    of the (j+2)-th band; the last band is always [x_g, inf).  c_hat1/c_hat2
    are the period constants of the third-kind differential (c_hat2 is kept
    in the interfaces but exercised at 0: real configurations).
    """

    x: tuple[float, ...]
    u: tuple[float, ...]
    y0: float
    sigma: tuple[Side, ...]
    c_hat1: tuple[float, ...] = ()
    c_hat2: tuple[float, ...] = ()
    t: complex = 1.0 + 0j

    @property
    def g(self) -> int:
        return len(self.x)

    @property
    def branch_points(self) -> tuple[float, ...]:
        return tuple(sorted((0.0, 1.0) + self.x + self.u))

    @property
    def bands(self) -> tuple[tuple[float, float], ...]:
        mids = []
        for j in range(self.g - 1):
            xj, uj = self.x[j], self.u[j]
            mids.append((xj, uj) if self.sigma[j] == "l" else (uj, xj))
        return ((0.0, 1.0), *mids, (self.x[-1], math.inf))

    @property
    def gaps(self) -> tuple[tuple[float, float], ...]:
        b = self.bands
        return tuple((b[k][1], b[k + 1][0]) for k in range(len(b) - 1))

    def model(self) -> BranchModel:
        return BranchModel(self.branch_points, self.bands)

    def to_dict(self) -> dict:
        return {
            "x": list(self.x),
            "u": list(self.u),
            "y0": self.y0,
            "c1": list(self.c_hat1),
            "c2": list(self.c_hat2),
            "sigma": list(self.sigma),
            "t": [self.t.real, self.t.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TCurveConfig":
        t = data.get("t", [1.0, 0.0])
        return validate_config(
            x=data["x"],
            u=data["u"],
            y0=data["y0"],
            sigma=data.get("sigma"),
            c_hat1=data.get("c1"),
            c_hat2=data.get("c2"),
            t=complex(t[0], t[1]),
        )


@dataclass(frozen=True)
class SheetedPoint:
    """Point on the double cover: u-coordinate plus sheet sign.

    The sheet flips under the hyperelliptic involution; sheet +1 carries the
    principal branch fixed in this module.
    """

    u: complex
    sheet: int = 1

    def involution(self) -> "SheetedPoint":
        return SheetedPoint(self.u, -self.sheet)


def validate_config(
    x,
    u,
    y0,
    sigma=None,
    c_hat1=None,
    c_hat2=None,
    t=1.0 + 0j,
) -> TCurveConfig:
    """Check all TCurveConfig invariants; raise ConfigError listing failures."""
    violations = []
    x = tuple(float(v) for v in x)
    u = tuple(float(v) for v in u)
    g = len(x)
    if g < 2:
        violations.append(f"genus g = {g} < 2")
    if len(u) != max(g - 1, 0):
        violations.append(f"len(u) = {len(u)} != g-1 = {g - 1}")
    if sigma is None:
        sigma = ("l",) * len(u)
    sigma = tuple(sigma)
    if len(sigma) != len(u):
        violations.append(f"len(sigma) = {len(sigma)} != g-1 = {len(u)}")
    if any(s not in ("l", "r") for s in sigma):
        violations.append(f"sigma entries must be 'l' or 'r', got {sigma}")
    c_hat1 = tuple(c_hat1) if c_hat1 else (0.0,) * g
    c_hat2 = tuple(c_hat2) if c_hat2 else (0.0,) * g
    if len(c_hat1) != g or len(c_hat2) != g:
        violations.append("c_hat vectors must have length g")
    if violations:
        raise ConfigError(violations)

    pts = (0.0, 1.0) + x + u + (float(y0),)
    scale = max(abs(p) for p in pts)
    srt = sorted(pts)
    for a, b in zip(srt, srt[1:]):
        if b - a < COLLISION_RTOL * scale:
            violations.append(f"coincident branch points near {a}")
    cfg = TCurveConfig(x, u, float(y0), sigma, c_hat1, c_hat2, complex(t))
    bands = cfg.bands
    for j, ((_, hi), (lo2, _)) in enumerate(zip(bands, bands[1:])):
        if not hi < lo2:
            violations.append(f"bands {j} and {j + 1} overlap or touch")
    for lo, hi in bands:
        if lo <= y0 <= hi:
            violations.append(f"y0 = {y0} lies inside band [{lo}, {hi}]")
    if violations:
        raise ConfigError(violations)
    return cfg


# ---------------------------------------------------------------------------
# square roots and phi evaluations on the normalized model


def sqrt_delta(config: TCurveConfig, z, sheet: int = 1):
    """v = sqrt(Delta(z)) with cuts along the bands, sheet +1 principal.

    Returns 0 at branch points.  For real z on a cut the upper-edge limit is
    returned; the value is positive real on the upper edge of [x_g, inf).
    """
    return sheet * config.model().sqrt(z)


def phi_branch(config: TCurveConfig, k: int) -> complex:
    """phi(P_{a_k}) = 2 / sqrt(prod_{j != k}(a_k - a_j)), principal root.

    The individual sign is a local-coordinate choice; only products such as
    Omega(P_a) phi(P_a) are convention-free, and those come out consistent
    because every module uses this same helper.
    """
    pts = config.branch_points
    ak = pts[k]
    prod = complex(1.0)
    for j, aj in enumerate(pts):
        if j != k:
            prod *= ak - aj
    return 2.0 / np.sqrt(complex(prod))


def phi_q0(config: TCurveConfig) -> complex:
    """phi(Q0) for the marked point over y0.

    Q0 is fixed on sheet -1 so that the third-kind differential normalized
    over the frozen homology coincides with eta-hat (not minus it) on the
    principal sheet; see the bridge test in measures.
    """
    return -1.0 / complex(sqrt_delta(config, config.y0))


def phi_eval(config: TCurveConfig, where) -> complex:
    """Evaluate phi at a point, per the local-coordinate evaluation rule.

    ``where`` is "infinity", ("branch", k), or ("regular", y).  Regular
    evaluation uses the Q0-sheet lift, so phi_eval(cfg, ("regular", y0))
    equals phi(Q0).
    """
    if where == "infinity":
        return 0.0 + 0j
    kind, val = where
    if kind == "branch":
        return phi_branch(config, int(val))
    if kind == "regular":
        y = float(val)
        if any(abs(y - a) < COLLISION_RTOL for a in config.branch_points):
            raise PoleOnContourError(f"regular-point evaluation at branch point {y}")
        return -1.0 / complex(sqrt_delta(config, y))
    raise ValueError(f"unknown evaluation point {where!r}")


# ---------------------------------------------------------------------------
# Moebius normalization between the two models


@dataclass(frozen=True)
class MoebiusMap:
    """Affine pre-normalization composed with rho(z) = z y0 / (z - u_last).

    The affine part sends the fixed (leftmost) interval to [0, 1]; rho then
    maps {0, 1, u_last} to {0, 1, inf} and the original pole (infinity) to
    y0 = 1 - u_last.  rho is increasing away from its pole, so the endpoint
    order inside [0, u_last) is preserved.
    """

    shift: float
    scale: float
    u_last: float

    @property
    def y0(self) -> float:
        return 1.0 - self.u_last

    def affine(self, z):
        return (np.asarray(z) - self.shift) / self.scale

    def forward(self, z):
        zp = self.affine(z)
        return zp * self.y0 / (zp - self.u_last)

    def inverse(self, w):
        w = np.asarray(w)
        zp = w * (1.0 - self.y0) / (w - self.y0)
        return zp * self.scale + self.shift


def hat_system(x_hat, u_hat, sigma_hat) -> IntervalSystem:
    """Assemble the original-coordinate support [0,1] plus movable intervals.

    Entry j of sigma_hat is 'l' when the independent endpoint x_hat[j] is
    the left endpoint of the (j+2)-th interval.
    """
    bands = [(0.0, 1.0)]
    for xh, uh, s in zip(x_hat, u_hat, sigma_hat):
        bands.append((xh, uh) if s == "l" else (uh, xh))
    return IntervalSystem.from_bands(bands)


def moebius_normalize(
    E: IntervalSystem, sigma_hat: Sequence[Side]
) -> tuple[TCurveConfig, MoebiusMap]:
    """Normalize a hat interval system to a TCurveConfig.

    ``sigma_hat`` has one entry per movable interval (all but the leftmost,
    left to right): 'l' if the independent endpoint is the left one.  The
    last entry must be 'l' so the global maximum is a dependent endpoint,
    which is the point rho sends to infinity.
    """
    if E.d < 3:
        raise ConfigError([f"moebius normalization needs d >= 3, got d = {E.d}"])
    sigma_hat = tuple(sigma_hat)
    if len(sigma_hat) != E.d - 1:
        raise ConfigError(
            [f"sigma_hat must have {E.d - 1} entries, got {len(sigma_hat)}"]
        )
    if sigma_hat[-1] != "l":
        raise ConfigError(
            ["the rightmost interval must have its dependent endpoint on the right"]
        )
    bands = E.bands
    lo0, hi0 = bands[0]
    shift, scale = lo0, hi0 - lo0
    u_last = (E.endpoints[0] - shift) / scale
    if min(abs(u_last), abs(u_last - 1.0)) < COLLISION_RTOL:
        raise ConfigError([f"degenerate transform: u_last = {u_last} in {{0, 1}}"])
    mmap = MoebiusMap(shift=shift, scale=scale, u_last=u_last)

    x_hat, u_hat = [], []
    for j, (lo, hi) in enumerate(bands[1:]):
        lo_a = (lo - shift) / scale
        hi_a = (hi - shift) / scale
        if sigma_hat[j] == "l":
            x_hat.append(lo_a)
            u_hat.append(hi_a)
        else:
            x_hat.append(hi_a)
            u_hat.append(lo_a)
    y0 = mmap.y0
    rho = lambda v: v * y0 / (v - u_last)
    x = tuple(rho(v) for v in x_hat)
    u = tuple(rho(v) for v in u_hat[:-1])
    cfg = validate_config(x=x, u=u, y0=y0, sigma=sigma_hat[:-1])
    return cfg, mmap


def moebius_denormalize(config: TCurveConfig) -> tuple[IntervalSystem, tuple[Side, ...]]:
    """Invert the normalization (up to the affine part, returned as [0,1]).

    Uses the closed-form inverse: u_hat_g = 1 - y0, u_hat_j = u_j(1-y0)/(u_j-y0),
    x_hat_k = x_k(1-y0)/(x_k-y0).
    """
    y0 = config.y0
    inv = lambda w: w * (1.0 - y0) / (w - y0)
    x_hat = [inv(v) for v in config.x]
    u_hat = [inv(v) for v in config.u] + [1.0 - y0]
    bands = [(0.0, 1.0)]
    sigma_hat = config.sigma + ("l",)
    for xh, uh, s in zip(x_hat, u_hat, sigma_hat):
        bands.append((xh, uh) if s == "l" else (uh, xh))
    return IntervalSystem.from_bands(bands), sigma_hat
