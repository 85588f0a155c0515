"""Numerical checks of the rational partial-fraction identities used by the
residue calculus (sums over a point set versus closed forms)."""

import math

import numpy as np
import pytest


def _points(rng, N):
    u = rng.uniform(-2, 2, N) + 1j * rng.uniform(-2, 2, N)
    x = complex(rng.uniform(2.5, 4.0), rng.uniform(0.1, 1.0))
    y = complex(rng.uniform(-4.0, -2.5), rng.uniform(-1.0, -0.1))
    return u, x, y


def _prod_others(u, k):
    return np.prod([u[k] - u[a] for a in range(len(u)) if a != k])


def test_simple_pole_expansion(rng):
    # sum_k 1/((x - u_k) prod_{a != k}(u_k - u_a)) = 1/prod (x - u_a)
    for N in (2, 3, 5):
        u, x, _ = _points(rng, N)
        lhs = sum(1.0 / ((x - u[k]) * _prod_others(u, k)) for k in range(N))
        rhs = 1.0 / np.prod(x - u)
        assert lhs == pytest.approx(rhs, rel=1e-11)


def test_shifted_power_expansions(rng):
    # with (u_k - y)^s numerators: the same closed form up to s = N - 1,
    # and an extra -1 at s = N
    for N in (2, 4):
        u, x, y = _points(rng, N)
        for s in range(N):
            lhs = sum(
                (u[k] - y) ** s / ((x - u[k]) * _prod_others(u, k)) for k in range(N)
            )
            rhs = (x - y) ** s / np.prod(x - u)
            assert lhs == pytest.approx(rhs, rel=1e-10), (N, s)
        lhs = sum(
            (u[k] - y) ** N / ((x - u[k]) * _prod_others(u, k)) for k in range(N)
        )
        rhs = (x - y) ** N / np.prod(x - u) - 1.0
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_unit_and_null_sums(rng):
    # sum (u_k - y)^{N-1} / prod_others = 1; lower powers sum to zero
    for N in (2, 3, 6):
        u, _, y = _points(rng, N)
        top = sum((u[k] - y) ** (N - 1) / _prod_others(u, k) for k in range(N))
        assert top == pytest.approx(1.0, abs=1e-10)
        for s in range(N - 1):
            low = sum((u[k] - y) ** s / _prod_others(u, k) for k in range(N))
            assert abs(low) <= 1e-10


def test_inverse_power_expansion(rng):
    # sum 1/((u_k - y)^s (x - u_k) prod_others) in terms of a y-derivative
    for N, s in ((3, 1), (3, 2), (4, 3)):
        u, x, y = _points(rng, N)
        lhs = sum(
            1.0 / ((u[k] - y) ** s * (x - u[k]) * _prod_others(u, k))
            for k in range(N)
        )
        h = 1e-4

        def F(yv):
            return 1.0 / ((x - yv) * np.prod(yv - u))

        if s == 1:
            der = F(y)
        else:
            # (s-1)-th derivative by a centered stencil, Richardson once
            pts = np.arange(-4, 5)
            vals = np.array([F(y + p * h) for p in pts])
            fit = np.polynomial.polynomial.polyfit(pts * h, vals, 8)
            der = fit[s - 1] * math.factorial(s - 1)
        rhs = 1.0 / ((x - y) ** s * np.prod(x - u)) - der / math.factorial(s - 1)
        assert lhs == pytest.approx(rhs, rel=1e-7), (N, s)


def test_excluded_point_sums(rng):
    # sums skipping a marked u_m, low powers and the top power with its
    # inhomogeneous term
    for N in (3, 5):
        u, _, y = _points(rng, N)
        m = 1
        others = [k for k in range(N) if k != m]
        for s in range(N):
            lhs = sum(
                (u[k] - y) ** s / ((u[k] - u[m]) * _prod_others(u, k))
                for k in others
            )
            lead = sum(1.0 / (u[m] - u[b]) for b in others)
            rhs = (
                -s * (u[m] - y) ** (s - 1) / _prod_others(u, m)
                + (u[m] - y) ** s / _prod_others(u, m) * lead
            )
            if s == N:
                rhs += 1.0
            assert lhs == pytest.approx(rhs, rel=1e-9), (N, s)
        lhs = sum(
            (u[k] - y) ** N / ((u[k] - u[m]) * _prod_others(u, k)) for k in others
        )
        lead = sum(1.0 / (u[m] - u[b]) for b in others)
        rhs = (
            1.0
            - N * (u[m] - y) ** (N - 1) / _prod_others(u, m)
            + (u[m] - y) ** N / _prod_others(u, m) * lead
        )
        assert lhs == pytest.approx(rhs, rel=1e-9)


def test_excluded_point_inverse_powers(rng):
    # the r-th derivative form with a skipped marked point
    for N, r in ((3, 0), (4, 1), (4, 2)):
        u, _, y = _points(rng, N)
        m = 0
        others = [k for k in range(N) if k != m]
        lhs = sum(
            1.0 / ((u[k] - y) ** (r + 1) * (u[k] - u[m]) * _prod_others(u, k))
            for k in others
        )
        lead = sum(1.0 / (u[m] - u[b]) for b in others)

        def F(yv):
            return 1.0 / ((u[m] - yv) * np.prod(yv - u))

        if r == 0:
            der = F(y)
        else:
            h = 1e-4
            pts = np.arange(-4, 5)
            vals = np.array([F(y + p * h) for p in pts])
            fit = np.polynomial.polynomial.polyfit(pts * h, vals, 8)
            der = fit[r] * math.factorial(r)
        rhs = (
            lead / ((u[m] - y) ** (r + 1) * _prod_others(u, m))
            + (r + 1) / ((u[m] - y) ** (r + 2) * _prod_others(u, m))
            + der / math.factorial(r)
        )
        assert lhs == pytest.approx(rhs, rel=1e-7), (N, r)
