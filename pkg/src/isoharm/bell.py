"""Partition polynomials L_l and closed-form y0-derivatives of powers of phi.

L_l is a signed variant of the complete exponential Bell polynomial,

    L_l(z_1..z_l) = sum over p_1 + 2 p_2 + ... + l p_l = l of
        (-1)^{sum p} l! / (2^{sum p} prod p_k! prod k^{p_k}) * prod z_k^{p_k},

and carries the combinatorics of repeated d/dy0 applied to 1/phi(Q0) through
the power sums Sigma_k over the branch points.  Coefficients are exact
rationals, computed once per order and cached; evaluation is floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .curve import PoleOnContourError, TCurveConfig, phi_q0

MAX_ORDER = 32


@dataclass(frozen=True)
class PartitionTerm:
    """One monomial of L_l: exponents (p_1..p_l) with sum k p_k = l."""

    exponents: tuple[int, ...]
    coefficient: Fraction


def coefficient(exponents) -> Fraction:
    """Exact coefficient attached to an exponent tuple (p_1, p_2, ...)."""
    s = sum(exponents)
    l = sum(k * p for k, p in enumerate(exponents, start=1))
    num = Fraction((-1) ** s * factorial(l))
    den = Fraction(2**s)
    for k, p in enumerate(exponents, start=1):
        den *= factorial(p) * k**p
    return num / den


def _exponent_tuples(l: int):
    """All (p_1..p_l) with sum k p_k = l, in lexicographic order."""
    out = []

    def rec(k, remaining, prefix):
        if k > l:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for p in range(remaining // k + 1):
            rec(k + 1, remaining - k * p, prefix + [p])

    rec(1, l, [])
    out.sort()
    return tuple(out)


@lru_cache(maxsize=None)
def partition_terms(l: int) -> tuple[PartitionTerm, ...]:
    if l < 0:
        raise ValueError("order must be nonnegative")
    if l > MAX_ORDER:
        raise ValueError(f"order {l} exceeds supported maximum {MAX_ORDER}")
    return tuple(PartitionTerm(e, coefficient(e)) for e in _exponent_tuples(l))


def bell_L(l: int, z) -> complex:
    """Evaluate L_l(z_1..z_l); L_0 = 1.  len(z) must equal l."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if l == 0:
        if z.size not in (0, 1):
            raise ValueError("L_0 takes an empty argument")
        return 1.0 + 0j
    if z.size != l:
        raise ValueError(f"L_{l} needs {l} arguments, got {z.size}")
    total = 0.0 + 0j
    for term in partition_terms(l):
        mono = complex(term.coefficient)
        for zk, p in zip(z, term.exponents):
            if p:
                mono *= zk**p
        total += mono
    return total


def sigma_sums(branch_points, y0: float, K: int) -> np.ndarray:
    """Power sums Sigma_k = sum_j (a_j - y0)^{-k}, k = 1..K."""
    a = np.asarray(branch_points, dtype=float)
    if np.any(np.abs(a - y0) == 0.0):
        raise PoleOnContourError(f"y0 = {y0} coincides with a branch point")
    inv = 1.0 / (a - y0)
    return np.array([np.sum(inv**k) for k in range(1, K + 1)])


def phi_inv_derivative(config: TCurveConfig, l: int, exponent: int = -1) -> complex:
    """d^l/dy0^l of phi(Q0)^n via L_l, default n = -1 (i.e. 1/phi).

    Uses d^l phi^n / dy0^l = phi^n * L_l(-n Sigma_1, ..., -n Sigma_l).
    """
    sig = sigma_sums(config.branch_points, config.y0, l) if l else np.array([])
    phi0 = phi_q0(config)
    return phi0**exponent * bell_L(l, -exponent * sig)
