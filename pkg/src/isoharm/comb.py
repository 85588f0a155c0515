"""Schwarz-Christoffel comb map generated by the Green function.

theta maps the upper half-plane onto a vertical semi-strip with slits: the
support goes to the base segment [0, 1], each gap to a vertical slit at
abscissa q_j equal to the j-th frequency, and the slit tips are the images
of the gap zeros of the measure differential.  With this package's branch
conventions the holomorphic realization is theta = +i G / pi (the imaginary
part of G accumulates -pi times the mass per band), which lands exactly on
Re theta in [0, 1] and Im theta >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import IntervalSystem
from .deform import DeformationPath
from .measures import eta, frequency_map, green_function
from .periods import DEFAULT_NODES


@dataclass(frozen=True)
class CombRegion:
    """Slit abscissae q (the frequencies) and slit heights h."""

    q: tuple[float, ...]
    h: tuple[float, ...]


def comb_map(E: IntervalSystem, z, node_count: int = DEFAULT_NODES) -> complex:
    """theta(z) = i G_E(z, inf) / pi for Im z >= 0."""
    z = complex(z)
    if z.imag < 0:
        raise ValueError("comb map is defined on the closed upper half-plane")
    return complex(1j * green_function(E, z, math.inf, node_count) / np.pi)


def comb_region(E: IntervalSystem, node_count: int = DEFAULT_NODES) -> CombRegion:
    """Slit data: q = frequencies, h = Im theta at the gap zeros of eta."""
    q = frequency_map(E, node_count).values if E.d > 1 else ()
    zeros = eta(E, node_count).gap_zeros
    h = tuple(float(comb_map(E, gz, node_count).imag) for gz in zeros)
    return CombRegion(tuple(q), h)


def boundary_polyline(
    E: IntervalSystem, samples_per_segment: int = 64, node_count: int = DEFAULT_NODES
) -> np.ndarray:
    """Sample theta along the support hull; rows are (Re theta, Im theta).

    The image traverses the comb boundary: flat on bands, up-and-down the
    slits over the gaps.
    """
    segs = []
    bands = E.bands
    for k, (lo, hi) in enumerate(bands):
        segs.append((lo, hi))
        if k + 1 < len(bands):
            segs.append((hi, bands[k + 1][0]))
    rows = []
    for lo, hi in segs:
        pad = 1e-9 * (hi - lo)
        for z in np.linspace(lo + pad, hi - pad, samples_per_segment):
            th = comb_map(E, z, node_count)
            rows.append((th.real, th.imag))
    return np.array(rows)


def rectification_check(
    path: DeformationPath, node_count: int = DEFAULT_NODES
) -> dict:
    """Drift of the comb data along a deformation path.

    Isoequilibrium deformations keep the slit abscissae fixed while moving
    only the heights; the report carries the maximal q-drift over all steps
    and the total h-change between the endpoints.
    """
    if path.policy != "equilibrium":
        raise ValueError("rectification is a statement about isoequilibrium paths")
    regions = [comb_region(E, node_count) for E in path.hat_systems]
    q0 = np.asarray(regions[0].q)
    q_drift = max(
        float(np.max(np.abs(np.asarray(r.q) - q0))) for r in regions[1:]
    ) if len(regions) > 1 else 0.0
    h0 = np.asarray(regions[0].h)
    h_end = np.asarray(regions[-1].h)
    return {
        "q_drift": q_drift,
        "h_change": float(np.max(np.abs(h_end - h0))),
        "q0": tuple(q0),
        "h_start": tuple(h0),
        "h_end": tuple(h_end),
        "steps": len(regions) - 1,
    }
