"""Equilibrium and harmonic measures, Green functions, and the frequency map.

The third-kind differential eta = k(z) dz / mu on the even-degree model is
pinned by vanishing gap integrals plus leading coefficient 1 (residues -1/+1
at the upper/lower point over infinity); the pole-at-y0 variant eta-hat
replaces the leading-coefficient normalization by the point condition
k(y0) = -sqrt(Delta(y0)) on the principal branch.  Band masses come out of
the signed band integrals as (i/pi) times the integral, which is the
no-absolute-value realization of (1/pi) * integral of |eta| (the sign of k
and the parity of the branch cut cancel band by band).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .curve import (
    BranchModel,
    ConfigError,
    IntervalSystem,
    PoleOnContourError,
    TCurveConfig,
    hat_system,
    sqrt_delta,
)
from .periods import (
    DEFAULT_NODES,
    DifferentialRep,
    integrate_smooth,
    integrate_sqrt_both,
    integrate_sqrt_left_excl,
    integrate_tail_excl,
)

MASS_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class EtaData:
    """Numerator polynomial of a third-kind measure differential.

    k_coeffs ascending; pole is None for the pole-at-infinity eta and the
    pole projection for eta-hat.  gap_zeros holds the one real zero located
    in each gap (the comb slit tips).
    """

    k_coeffs: tuple[complex, ...]
    gap_zeros: tuple[float, ...]
    pole: float | None

    def k_at(self, z):
        return np.polynomial.polynomial.polyval(z, np.asarray(self.k_coeffs))


@dataclass(frozen=True)
class FrequencyVector:
    """Strictly increasing partial sums of band masses, in (0, 1)."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        seq = (0.0,) + vals + (1.0,)
        if any(b <= a for a, b in zip(seq, seq[1:])):
            raise ConfigError([f"frequencies not strictly increasing in (0,1): {vals}"])

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def _eta_plane(model: BranchModel, coeffs, pole):
    def f(z):
        z = np.asarray(z, dtype=complex)
        val = np.polynomial.polynomial.polyval(z, np.asarray(coeffs)) / model.sqrt(z)
        if pole is not None:
            val = val / (z - pole)
        return val

    return f


def _eta_numer(coeffs, pole):
    def f(z):
        z = np.asarray(z, dtype=complex)
        val = np.polynomial.polynomial.polyval(z, np.asarray(coeffs))
        if pole is not None:
            val = val / (z - pole)
        return val

    return f


def _locate_gap_zeros(model: BranchModel, coeffs) -> tuple[float, ...]:
    """One real zero of the numerator per gap, by bisection."""
    zeros = []
    kpoly = np.asarray(coeffs)
    scale = max(abs(c) for c in kpoly.ravel()) or 1.0
    direction = kpoly if abs(kpoly.imag).max() < abs(kpoly.real).max() * 1e-8 else kpoly / 1j
    kre = np.real(direction)

    def kval(z):
        return np.polynomial.polynomial.polyval(z, kre)

    for lo, hi in model.gaps:
        a, b = lo + 1e-12 * (hi - lo), hi - 1e-12 * (hi - lo)
        if kval(a) * kval(b) > 0:
            grid = np.linspace(a, b, 257)
            vals = kval(grid)
            idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
            if len(idx) == 0:
                zeros.append(math.nan)
                continue
            a, b = grid[idx[0]], grid[idx[0] + 1]
        zeros.append(brentq(kval, a, b, xtol=1e-14))
    return tuple(zeros)


def eta(E: IntervalSystem, node_count: int = DEFAULT_NODES) -> EtaData:
    """Solve (eq:diff): monic degree d-1 numerator with vanishing gap integrals."""
    model = E.model()
    d = E.d
    if d == 1:
        return EtaData((1.0 + 0j,), (), None)
    G = np.empty((d - 1, d), dtype=complex)
    for m in range(d):
        f = _eta_plane(model, (0.0,) * m + (1.0,), None)
        for j, (lo, hi) in enumerate(model.gaps):
            G[j, m] = integrate_sqrt_both(f, lo, hi, node_count)
    coeffs = np.empty(d, dtype=complex)
    coeffs[d - 1] = 1.0
    coeffs[: d - 1] = np.linalg.solve(G[:, : d - 1], -G[:, d - 1])
    zeros = _locate_gap_zeros(model, coeffs)
    return EtaData(tuple(coeffs), zeros, None)


def _pv_gap_integral(model, m, y0, lo, hi, node_count):
    """Principal value of int_gap z^m / ((z - y0) sqrt(Delta)) dz, y0 in the gap.

    Subtracts the pole and integrates the closed form of the subtracted part;
    the remainder has a removable singularity at y0 and keeps only the
    endpoint inverse-sqrt behavior.
    """
    s0 = complex(model.sqrt(y0))
    c0 = y0**m / s0

    def f(z):
        return (z**m / model.sqrt(z) - c0) / (z - y0)

    pv_log = c0 * math.log((hi - y0) / (y0 - lo))
    return integrate_sqrt_both(f, lo, hi, node_count) + pv_log


def eta_hat_intervals(
    E: IntervalSystem, y0: float, node_count: int = DEFAULT_NODES
) -> EtaData:
    """Pole-at-y0 differential on the even model (degree d-1 numerator).

    Conditions: vanishing gap integrals plus k(y0) = -sqrt(Delta(y0)) on the
    principal branch; for the gap containing y0 the integral is a principal
    value (the two one-sided Green boundary values match there).
    """
    model = E.model()
    if model.locate(y0) == "band":
        raise PoleOnContourError(f"pole y0 = {y0} lies inside the support")
    d = E.d
    A = np.empty((d, d), dtype=complex)
    rhs = np.zeros(d, dtype=complex)
    for m in range(d):
        f = _eta_plane(model, (0.0,) * m + (1.0,), y0)
        for j, (lo, hi) in enumerate(model.gaps):
            if lo < y0 < hi:
                A[j, m] = _pv_gap_integral(model, m, y0, lo, hi, node_count)
            else:
                A[j, m] = integrate_sqrt_both(f, lo, hi, node_count)
        A[d - 1, m] = y0**m
    rhs[d - 1] = -complex(model.sqrt(y0))
    coeffs = np.linalg.solve(A, rhs)
    zeros = _locate_gap_zeros(model, coeffs)
    return EtaData(tuple(coeffs), zeros, y0)


def eta_hat(config: TCurveConfig, node_count: int = DEFAULT_NODES) -> EtaData:
    """Pole-at-y0 differential on the normalized odd model (degree g numerator)."""
    model = config.model()
    y0 = config.y0
    if model.locate(y0) == "band":
        raise PoleOnContourError(f"pole y0 = {y0} lies inside the support")
    g = config.g
    A = np.empty((g + 1, g + 1), dtype=complex)
    rhs = np.zeros(g + 1, dtype=complex)
    for m in range(g + 1):
        f = _eta_plane(model, (0.0,) * m + (1.0,), y0)
        for j, (lo, hi) in enumerate(model.gaps):
            if lo < y0 < hi:
                raise PoleOnContourError(f"pole y0 = {y0} inside gap ({lo}, {hi})")
            A[j, m] = integrate_sqrt_both(f, lo, hi, node_count)
        A[g, m] = y0**m
    rhs[g] = -complex(sqrt_delta(config, y0))
    coeffs = np.linalg.solve(A, rhs)
    zeros = _locate_gap_zeros(model, coeffs)
    return EtaData(tuple(coeffs), zeros, y0)


def eta_hat_rep(config: TCurveConfig, node_count: int = DEFAULT_NODES) -> DifferentialRep:
    data = eta_hat(config, node_count)
    return DifferentialRep(data.k_coeffs, config.y0, config)


def _band_masses(model: BranchModel, data: EtaData, node_count: int) -> np.ndarray:
    """Signed band integrals turned into positive masses summing to one."""
    f = _eta_plane(model, data.k_coeffs, data.pole)
    numer = _eta_numer(data.k_coeffs, data.pole)
    raw = []
    for lo, hi in model.bands:
        if math.isinf(hi):
            raw.append(integrate_tail_excl(numer, model, lo, node_count))
        else:
            raw.append(integrate_sqrt_both(f, lo, hi, node_count))
    masses = np.real(1j * np.array(raw)) / np.pi
    if masses.sum() < 0:
        masses = -masses
    if np.any(masses <= 0):
        raise ConfigError([f"non-positive band mass in {masses}"])
    imag_defect = np.abs(np.imag(1j * np.array(raw))).max() / np.pi
    if imag_defect > MASS_IMAG_TOL * max(1.0, np.abs(masses).max()):
        raise ConfigError([f"band masses not real: defect {imag_defect:.3e}"])
    return masses / masses.sum()


def equilibrium_measure(E: IntervalSystem, node_count: int = DEFAULT_NODES) -> np.ndarray:
    """Band masses of the pole-at-infinity equilibrium measure, left to right."""
    return _band_masses(E.model(), eta(E, node_count), node_count)


def harmonic_measures(
    E: IntervalSystem, y0: float, node_count: int = DEFAULT_NODES
) -> np.ndarray:
    """Harmonic measures of the bands with pole y0 (left to right).

    y0 = math.inf recovers the equilibrium measure.
    """
    if math.isinf(y0):
        return equilibrium_measure(E, node_count)
    return _band_masses(E.model(), eta_hat_intervals(E, y0, node_count), node_count)


def harmonic_measures_config(
    config: TCurveConfig, node_count: int = DEFAULT_NODES
) -> np.ndarray:
    """Harmonic measures of the g+1 bands of the normalized model."""
    return _band_masses(config.model(), eta_hat(config, node_count), node_count)


def frequency_map(E: IntervalSystem, node_count: int = DEFAULT_NODES) -> FrequencyVector:
    """Cumulative-from-the-left partial sums of the equilibrium masses."""
    masses = equilibrium_measure(E, node_count)
    return FrequencyVector(tuple(np.cumsum(masses)[:-1]))


def frequency_map_fixed(
    x_hat, u_hat, sigma_hat, node_count: int = DEFAULT_NODES
) -> FrequencyVector:
    """Frequency map at fixed independent data, as a function of the movable
    dependent endpoints (the map the Newton engine inverts)."""
    return frequency_map(hat_system(x_hat, u_hat, sigma_hat), node_count)


def harmonic_partial_sums(
    config: TCurveConfig, node_count: int = DEFAULT_NODES
) -> np.ndarray:
    """Partial sums of harmonic measures over bands 1..g (the deform targets)."""
    masses = harmonic_measures_config(config, node_count)
    return np.cumsum(masses)[:-1]


# ---------------------------------------------------------------------------
# Green functions


def _axis_integral(
    model: BranchModel, data: EtaData, x_to: float, node_count: int
) -> complex:
    """Integral of the measure differential along the real axis from the
    leftmost branch point to x_to; values are upper-edge.

    Full bands and gaps use the two-endpoint substitution (the absorbed
    weight shares the endpoint subtraction, so no digits are lost there);
    partial segments starting at a branch point use the exact-root form.
    A finite pole crossed by the walk is handled as a principal value plus
    the semicircle detour above it (adding -i pi times the plane residue).
    """
    f = _eta_plane(model, data.k_coeffs, data.pole)
    numer = _eta_numer(data.k_coeffs, data.pole)
    pole = data.pole
    pts = list(model.branch_points)
    scale = max(abs(p) for p in pts) or 1.0
    for p in pts:
        if abs(x_to - p) <= 1e-12 * scale:
            x_to = p
            break
    start = pts[0]

    def seg(a, b, left_singular_only=False):
        if pole is not None and min(a, b) < pole < max(a, b):
            return _pv_segment(model, data, a, b, node_count, left_singular_only)
        if left_singular_only:
            return integrate_sqrt_left_excl(numer, model, a, b, node_count)
        return integrate_sqrt_both(f, a, b, node_count)

    if x_to == start:
        return 0.0 + 0j
    if x_to < start:
        return -seg(start, x_to, left_singular_only=True)
    total = 0.0 + 0j
    cursor = start
    for nxt in pts[1:]:
        if x_to <= nxt:
            break
        total += seg(cursor, nxt)
        cursor = nxt
    if x_to > cursor:
        total += seg(cursor, x_to, left_singular_only=x_to not in pts)
    return total


def _pv_segment(
    model: BranchModel, data: EtaData, a: float, b: float,
    node_count: int, left_singular_only: bool,
) -> complex:
    """Principal value across an interior pole plus the upper detour.

    Subtracting c0 sqrt(Delta) from the raw numerator removes the pole from
    the quadrature path; the subtracted piece integrates to the closed-form
    PV logarithm, and the semicircle above adds -i pi c0 (c0 is the plane
    residue of the differential at the pole on the principal sheet).
    """
    pole = data.pole
    c0 = complex(data.k_at(pole)) / complex(model.sqrt(pole))

    def reg_numer(z):
        return (data.k_at(z) - c0 * model.sqrt(z)) / (z - pole)

    if left_singular_only:
        base = integrate_sqrt_left_excl(reg_numer, model, a, b, node_count)
    else:
        base = integrate_sqrt_both(
            lambda z: reg_numer(z) / model.sqrt(z), a, b, node_count
        )
    pv_log = c0 * math.log(abs((b - pole) / (pole - a)))
    return base + pv_log - 1j * math.pi * c0


def green_function(
    E: IntervalSystem,
    z,
    pole=math.inf,
    node_count: int = DEFAULT_NODES,
) -> complex:
    """Complex Green function G(z) = int_{c_2d}^z of eta (pole inf) or eta-hat.

    Re G vanishes on the support and is positive off it; near the pole the
    real part behaves like log|z| (pole inf) or -log|z - y0| (finite pole).
    Lower half-plane arguments are handled by conjugation symmetry.
    """
    data = eta(E, node_count) if math.isinf(pole) else eta_hat_intervals(E, pole, node_count)
    model = E.model()
    f = _eta_plane(model, data.k_coeffs, data.pole)
    z = complex(z)
    if z.imag < 0:
        return complex(np.conj(green_function(E, z.conjugate(), pole, node_count)))
    base = _axis_integral(model, data, z.real, node_count)
    if z.imag > 0:
        base += integrate_smooth(f, complex(z.real), z, node_count)
    return complex(base)
