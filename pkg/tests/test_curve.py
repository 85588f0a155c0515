import math

import numpy as np
import pytest

from isoharm.curve import (
    ConfigError,
    IntervalSystem,
    PoleOnContourError,
    moebius_denormalize,
    moebius_normalize,
    phi_branch,
    phi_eval,
    phi_q0,
    sqrt_delta,
    validate_config,
)


def test_validate_accepts_reference():
    cfg = validate_config(x=(2.0, 5.0), u=(3.0,), y0=-1.0, sigma=("l",))
    assert cfg.g == 2
    assert cfg.bands == ((0.0, 1.0), (2.0, 3.0), (5.0, math.inf))


def test_validate_rejects_coincident():
    with pytest.raises(ConfigError, match="coincident"):
        validate_config(x=(2.0, 2.0), u=(3.0,), y0=-1.0)


def test_validate_rejects_pole_in_band():
    with pytest.raises(ConfigError, match="inside band"):
        validate_config(x=(2.0, 5.0), u=(3.0,), y0=0.5)


def test_validate_collects_all_violations():
    try:
        validate_config(x=(2.0, 2.0), u=(3.0,), y0=2.0)
    except ConfigError as exc:
        assert len(exc.violations) >= 2
    else:
        pytest.fail("expected ConfigError")


def test_sqrt_zero_at_branch_points(cfg_g2):
    for a in cfg_g2.branch_points:
        assert sqrt_delta(cfg_g2, a) == 0

def test_sqrt_positive_above_brach_set(cfg_g2):
    v = sqrt_delta(cfg_g2, 50.0)
    assert v.imag == 0 and v.real > 0


def test_sqrt_sheet_flip(cfg_g2):
    z = 1.7 + 0.4j
    assert sqrt_delta(cfg_g2, z, -1) == -sqrt_delta(cfg_g2, z, +1)


def test_sqrt_matches_upper_limit(cfg_g2):
    for z in (0.4, 2.3, 7.0, -2.0, 1.5):
        lim = sqrt_delta(cfg_g2, z + 1e-13j)
        val = sqrt_delta(cfg_g2, z)
        assert val == pytest.approx(lim, rel=1e-5)


def test_even_model_conjugation_symmetry(cubic_system):
    m = cubic_system.model()
    for z in (0.3 + 1.2j, -2.0 + 0.1j, 1.9 - 0.7j):
        assert m.sqrt(np.conj(z)) == pytest.approx(np.conj(m.sqrt(z)), rel=1e-14)


def test_odd_model_conjugation_antisymmetry(cfg_g2):
    # the unbounded cut forces sqrt(conj z) = -conj(sqrt z)
    m = cfg_g2.model()
    for z in (0.3 + 1.2j, 4.0 + 0.5j, -1.5 - 2.0j):
        assert m.sqrt(np.conj(z)) == pytest.approx(-np.conj(m.sqrt(z)), rel=1e-14)


def test_sign_alternation(cfg_g2, cubic_system):
    # odd model: Delta > 0 on bands, < 0 on gaps; even model: the opposite
    m = cfg_g2.model()
    for lo, hi in m.bands:
        mid = lo + 1.0 if math.isinf(hi) else 0.5 * (lo + hi)
        assert m.delta(mid).real > 0
    for lo, hi in m.gaps:
        assert m.delta(0.5 * (lo + hi)).real < 0
    me = cubic_system.model()
    for lo, hi in me.bands:
        assert me.delta(0.5 * (lo + hi)).real < 0
    for lo, hi in me.gaps:
        assert me.delta(0.5 * (lo + hi)).real > 0
    # and the products of the two sheets make -Delta
    z = 0.5 * sum(m.gaps[0])
    prod = sqrt_delta(cfg_g2, z, +1) * sqrt_delta(cfg_g2, z, -1)
    assert prod == pytest.approx(-m.delta(z), rel=1e-13)


def test_phi_values(cfg_g2):
    assert phi_eval(cfg_g2, "infinity") == 0
    # branch factor identity phi(P_k)^2 prod_{j != k}(a_k - a_j) = 4
    pts = cfg_g2.branch_points
    for k, ak in enumerate(pts):
        prod = np.prod([ak - aj for j, aj in enumerate(pts) if j != k])
        val = phi_branch(cfg_g2, k) ** 2 * prod
        assert val == pytest.approx(4.0, rel=1e-12)
    # regression value for the reference configuration
    q0 = phi_q0(cfg_g2)
    assert q0**2 * np.prod([cfg_g2.y0 - a for a in pts]) == pytest.approx(1.0)
    assert q0 == pytest.approx(1j / 12.0)
    with pytest.raises(PoleOnContourError):
        phi_eval(cfg_g2, ("regular", 3.0))


def test_moebius_forward_images():
    E = IntervalSystem.from_bands([(0, 1), (2, 3), (5, 8)])
    cfg, mm = moebius_normalize(E, ("l", "l"))
    assert mm.forward(0.0) == 0
    assert mm.forward(1.0) == pytest.approx(1.0)
    assert abs(mm.forward(8.0 - 1e-13)) > 1e12
    assert cfg.y0 == pytest.approx(1.0 - 8.0)


def test_moebius_round_trip():
    E = IntervalSystem.from_bands([(0.5, 1.5), (2, 3), (4.5, 8)])
    cfg, mm = moebius_normalize(E, ("l", "l"))
    pts = np.array([0.5, 1.5, 2.0, 3.0, 4.5])
    assert mm.inverse(mm.forward(pts)) == pytest.approx(pts, abs=1e-14)
    E2, sigma2 = moebius_denormalize(cfg)
    scaled = (np.array(E.endpoints) - 0.5) / 1.0
    assert np.allclose(sorted(E2.endpoints), sorted(scaled), atol=1e-12)


def test_moebius_inverse_closed_form():
    # u_hat_g = 1 - y0; u_hat_j = u_j (1 - y0)/(u_j - y0); same for x_hat
    E = IntervalSystem.from_bands([(0, 1), (2, 3.2), (5, 8)])
    cfg, mm = moebius_normalize(E, ("l", "l"))
    y0 = cfg.y0
    assert 1.0 - y0 == pytest.approx(8.0)
    for uj, uh in zip(cfg.u, (3.2,)):
        assert uj * (1 - y0) / (uj - y0) == pytest.approx(uh, rel=1e-13)
    for xj, xh in zip(cfg.x, (2.0, 5.0)):
        assert xj * (1 - y0) / (xj - y0) == pytest.approx(xh, rel=1e-13)


def test_moebius_monotone_on_branch_points():
    E = IntervalSystem.from_bands([(0, 1), (2, 3), (5, 8)])
    cfg, mm = moebius_normalize(E, ("l", "l"))
    imgs = mm.forward(np.array([0.0, 1.0, 2.0, 3.0, 5.0]))
    assert np.all(np.diff(imgs) > 0)


def test_moebius_requires_dependent_right_end():
    E = IntervalSystem.from_bands([(0, 1), (2, 3), (5, 8)])
    with pytest.raises(ConfigError, match="dependent endpoint"):
        moebius_normalize(E, ("l", "r"))


def test_moebius_needs_three_intervals():
    with pytest.raises(ConfigError, match="d >= 3"):
        moebius_normalize(IntervalSystem.from_bands([(0, 1), (2, 3)]), ("l",))


def test_config_json_round_trip(cfg_g3):
    from isoharm.curve import TCurveConfig

    data = cfg_g3.to_dict()
    back = TCurveConfig.from_dict(data)
    assert back == cfg_g3


def test_sheeted_point_involution():
    from isoharm.curve import SheetedPoint

    p = SheetedPoint(2.5 + 1j, 1)
    assert p.involution().sheet == -1
    assert p.involution().u == p.u
