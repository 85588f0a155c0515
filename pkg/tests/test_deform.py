import numpy as np
import pytest

from isoharm.curve import IntervalSystem, moebius_normalize, validate_config
from isoharm import deform as df
from isoharm import measures as ms
from isoharm import pell as pl


from isoharm.curve import hat_system


def scaled_cubic():
    c = np.array(sorted(2.0 * np.cos(k * np.pi / 9.0) for k in (1, 2, 4, 5, 7, 8)))
    c = (c - c[0]) / (c[1] - c[0])
    return IntervalSystem(tuple(sorted(c, reverse=True)))


def test_invert_round_trip():
    Eh = scaled_cubic()
    sig = ("l", "l")
    x_hat = [Eh.bands[1][0], Eh.bands[2][0]]
    u_true = np.array([Eh.bands[1][1], Eh.bands[2][1]])
    f = ms.frequency_map(Eh)
    sol = df.invert_frequencies(
        {"x": x_hat, "sigma": sig, "y0": "pinned-infinity"},
        f,
        u_true + 1e-3,
    )
    np.testing.assert_allclose(sol, u_true, atol=1e-10)


def test_invert_cubic_target_from_coarse_guess():
    # target (1/3, 2/3) with the cubic x-data recovers the closed-form
    # endpoints of the polynomial-preimage support
    Eh = scaled_cubic()
    sig = ("l", "l")
    x_hat = [Eh.bands[1][0], Eh.bands[2][0]]
    u_true = np.array([Eh.bands[1][1], Eh.bands[2][1]])
    sol = df.invert_frequencies(
        {"x": x_hat, "sigma": sig, "y0": "pinned-infinity"},
        (1 / 3, 2 / 3),
        u_true * np.array([1.02, 0.99]),
    )
    np.testing.assert_allclose(sol, u_true, atol=1e-9)


def test_invert_local_uniqueness():
    Eh = scaled_cubic()
    sig = ("l", "l")
    x_hat = [Eh.bands[1][0], Eh.bands[2][0]]
    u_true = np.array([Eh.bands[1][1], Eh.bands[2][1]])
    target = (0.35, 0.7)
    sols = [
        df.invert_frequencies(
            {"x": x_hat, "sigma": sig, "y0": "pinned-infinity"}, target, guess
        )
        for guess in (u_true * 1.01, u_true * np.array([0.995, 1.02]))
    ]
    np.testing.assert_allclose(sols[0], sols[1], atol=1e-10)


def test_invert_harmonic_mode(cfg_g2):
    target = ms.harmonic_partial_sums(cfg_g2)
    guess = np.array(list(cfg_g2.u) + [cfg_g2.y0]) + np.array([1e-3, -1e-3])
    sol = df.invert_frequencies(
        {"x": cfg_g2.x, "sigma": cfg_g2.sigma, "y0": "free", "config": cfg_g2},
        target,
        guess,
    )
    np.testing.assert_allclose(sol, list(cfg_g2.u) + [cfg_g2.y0], atol=1e-9)


def test_invert_region_error(cfg_g2):
    target = ms.harmonic_partial_sums(cfg_g2)
    bad_guess = np.array([10.0, -1.0])  # u outside its gap bracket
    with pytest.raises(df.RegionError):
        df.invert_frequencies(
            {"x": cfg_g2.x, "sigma": cfg_g2.sigma, "y0": "free", "config": cfg_g2},
            target,
            bad_guess,
        )


def test_dependent_derivatives_match_fd(cfg_g2):
    du, dy0 = df.dependent_derivatives(cfg_g2)
    target = ms.harmonic_partial_sums(cfg_g2)
    h = 1e-5
    sols = {}
    for sgn in (1, -1):
        tmpl = validate_config(
            x=(cfg_g2.x[0] + sgn * h, cfg_g2.x[1]), u=cfg_g2.u, y0=cfg_g2.y0,
            sigma=cfg_g2.sigma,
        )
        sols[sgn], _ = df.solve_harmonic_config(tmpl, target)
    du_fd = (np.asarray(sols[1].u) - np.asarray(sols[-1].u)) / (2 * h)
    dy_fd = (sols[1].y0 - sols[-1].y0) / (2 * h)
    np.testing.assert_allclose(du_fd, du[:, 0], rtol=1e-6)
    assert dy_fd == pytest.approx(dy0[0], rel=1e-6)


def test_dy0_split_form(cfg_g3):
    du, dy0 = df.dependent_derivatives(cfg_g3)
    split = df.dy0_split_form(cfg_g3, du)
    np.testing.assert_allclose(split, dy0, atol=1e-11)


def test_zero_length_path(cfg_g2):
    path = df.integrate_path(cfg_g2, cfg_g2.x, 3, policy="harmonic")
    assert len(path.configs) >= 1
    assert path.max_drift() <= 1e-10
    assert path.configs[-1] == cfg_g2


def test_one_step_matches_direct_newton(cfg_g2):
    target = ms.harmonic_partial_sums(cfg_g2)
    x_end = (2.05, 5.02)
    path = df.integrate_path(cfg_g2, x_end, 1, policy="harmonic")
    tmpl = validate_config(x=x_end, u=cfg_g2.u, y0=cfg_g2.y0, sigma=cfg_g2.sigma)
    direct, _ = df.solve_harmonic_config(tmpl, target)
    np.testing.assert_allclose(path.configs[-1].u, direct.u, atol=1e-10)
    assert path.configs[-1].y0 == pytest.approx(direct.y0, abs=1e-10)


def test_path_isoharmonic_invariance(cfg_g2):
    path = df.integrate_path(cfg_g2, (2.3, 5.4), 20, policy="harmonic")
    hm0 = ms.harmonic_measures_config(path.configs[0])
    for cfg in path.configs[1:]:
        hm = ms.harmonic_measures_config(cfg)
        np.testing.assert_allclose(hm, hm0, atol=1e-9)


def test_rational_path_keeps_pell_solvable():
    # rational target frequencies: every 10th snapshot stays 3-regular
    Eh = scaled_cubic()
    cfg0, _ = moebius_normalize(Eh, ("l", "l"))
    x_hat = np.array([Eh.bands[1][0], Eh.bands[2][0]])
    path = df.integrate_path(
        cfg0, x_hat * np.array([1.04, 0.99]), 20, policy="equilibrium"
    )
    for hat in path.hat_systems[::10]:
        cert = pl.chebyshev_poly(hat, 3)
        assert cert.residual <= 1e-9
        assert cert.winding == (3, 2, 1)


def test_chebyshev_dynamics_chain_rule(cfg_g2):
    # reconstructed d u_hat / d x through the solved matrix matches the
    # direct chain-rule value
    W = df.chebyshev_dynamics(cfg_g2)
    du, dy0 = df.dependent_derivatives(cfg_g2)
    g = cfg_g2.g
    y0 = cfg_g2.y0
    M = np.empty((g, g))
    for k, xk in enumerate(cfg_g2.x):
        Ck = -y0 * (1 - y0) / (xk - y0) ** 2
        Dk = xk * (1 - xk) / (xk - y0) ** 2
        for i in range(g):
            M[i, k] = Ck * (i == k) + Dk * dy0[i]
    for j, uj in enumerate(cfg_g2.u):
        Aj = -y0 * (1 - y0) / (uj - y0) ** 2
        Bj = uj * (1 - uj) / (uj - y0) ** 2
        direct = Aj * du[j, :] + Bj * dy0
        np.testing.assert_allclose(M @ W[j, :], direct, atol=1e-9)
    np.testing.assert_allclose(M @ W[g - 1, :], -dy0, atol=1e-9)


def test_chebyshev_dynamics_vs_hat_fd(cfg_g2):
    from isoharm.curve import moebius_denormalize

    W = df.chebyshev_dynamics(cfg_g2)
    hat, sig = moebius_denormalize(cfg_g2)
    x_hat = [b[0] for b in hat.bands[1:]]
    u_hat = np.array([b[1] for b in hat.bands[1:]])
    f = np.asarray(ms.frequency_map(hat).values)
    h = 1e-5
    for k in range(cfg_g2.g):
        vals = {}
        for sgn in (1, -1):
            xh = list(x_hat)
            xh[k] += sgn * h
            vals[sgn] = df.invert_frequencies(
                {"x": xh, "sigma": sig, "y0": "pinned-infinity"}, f, u_hat
            )
        fd = (vals[1] - vals[-1]) / (2 * h)
        np.testing.assert_allclose(fd, W[:, k], rtol=1e-5, atol=1e-8)


def test_last_row_is_minus_dy0_in_hat_coords(cfg_g2):
    # u_hat_g = 1 - y0 makes the last dynamics row the negated y0 gradient
    W = df.chebyshev_dynamics(cfg_g2)
    du, dy0 = df.dependent_derivatives(cfg_g2)
    g = cfg_g2.g
    y0 = cfg_g2.y0
    M = np.empty((g, g))
    for k, xk in enumerate(cfg_g2.x):
        Ck = -y0 * (1 - y0) / (xk - y0) ** 2
        Dk = xk * (1 - xk) / (xk - y0) ** 2
        for i in range(g):
            M[i, k] = Ck * (i == k) + Dk * dy0[i]
    np.testing.assert_allclose(W[g - 1, :], np.linalg.solve(M, -dy0), atol=1e-12)


def test_partial_path_on_corrector_failure(cfg_g2):
    # push x_1 into the dependent point's band: admissibility must fail
    # mid-path and the diagnostic carries the accepted snapshots
    with pytest.raises(df.ConvergenceError) as err:
        df.integrate_path(cfg_g2, (2.99, 5.0), 50, policy="harmonic")
    partial = err.value.partial
    assert partial is not None
    assert len(partial.configs) >= 1
    assert partial.max_drift() <= 1e-10
