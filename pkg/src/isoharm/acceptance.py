"""Acceptance gates: every release criterion as a checkable row.

Each criterion function returns rows {criterion, value, bound, pass}; the
pytest acceptance module asserts them and the CLI selftest prints them.
Random configurations are seeded so reruns are byte-identical.
"""

from __future__ import annotations

import math

import numpy as np

from . import billiard as bl
from . import comb as cb
from . import deform as df
from . import measures as ms
from . import pell as pl
from . import periods as pr
from . import schlesinger as sc
from .bell import bell_L, phi_inv_derivative
from .curve import (
    IntervalSystem,
    TCurveConfig,
    hat_system,
    moebius_normalize,
    phi_q0,
    validate_config,
)

DEFAULT_SEED = 20240901


def _row(name: str, value: float, bound: float, larger_ok: bool = False) -> dict:
    ok = value >= bound if larger_ok else value <= bound
    return {
        "criterion": name,
        "value": float(value),
        "bound": float(bound),
        "pass": bool(ok),
    }


def cubic_preimage_system() -> IntervalSystem:
    """E = preimage of [-1, 1] under z^3 - 3z; endpoints 2 cos(k pi / 9)."""
    c = sorted(2.0 * np.cos(k * np.pi / 9.0) for k in (1, 2, 4, 5, 7, 8))
    return IntervalSystem(tuple(sorted(c, reverse=True)))


def reference_config_g2() -> TCurveConfig:
    return validate_config(x=(2.0, 5.0), u=(3.0,), y0=-1.0)


def reference_config_g3() -> TCurveConfig:
    return validate_config(x=(2.0, 5.0, 9.0), u=(3.0, 7.0), y0=-1.0)


def random_config(rng: np.random.Generator, g: int) -> TCurveConfig:
    """A valid normalized configuration with comfortably separated bands."""
    pts = [1.0]
    for _ in range(2 * g - 1):
        pts.append(pts[-1] + 0.4 + 1.6 * rng.random())
    x, u = [], []
    cursor = 1
    for j in range(g - 1):
        x.append(pts[cursor])
        u.append(pts[cursor + 1])
        cursor += 2
    x.append(pts[cursor])
    y0 = -0.4 - 1.5 * rng.random()
    return validate_config(x=tuple(x), u=tuple(u), y0=y0)


def agm(a: float, b: float) -> float:
    for _ in range(64):
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        if abs(a - b) < 1e-17 * a:
            break
    return a


def elliptic_K(k: float) -> float:
    """Complete elliptic integral via the arithmetic-geometric mean."""
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - k * k)))


# ---------------------------------------------------------------------------
# criteria


def criterion_1(node_count: int = 256, **_) -> list[dict]:
    E = cubic_preimage_system()
    masses = ms.equilibrium_measure(E, node_count)
    defect = float(np.abs(masses - 1.0 / 3.0).max())
    return [_row("1. cubic-preimage equilibrium masses = 1/3", defect, 1e-9)]


def criterion_2(node_count: int = 256, **_) -> list[dict]:
    E = cubic_preimage_system()
    cert3 = pl.chebyshev_poly(E, 3, node_count)
    p_exact = np.array([0.0, -3.0, 0.0, 1.0])
    rows = [
        _row("2a. cubic n=3 coefficients = z^3 - 3z",
             float(np.abs(np.array(cert3.p_coeffs) - p_exact).max()), 1e-10),
        _row("2b. cubic n=3 companion Q = 1",
             float(np.abs(np.array(cert3.q_coeffs) - np.array([1.0])).max()), 1e-10),
        _row("2c. cubic n=3 residual", cert3.residual, 1e-12),
    ]
    cert6 = pl.chebyshev_poly(E, 6, node_count)
    p6_exact = np.array([-1.0, 0.0, 18.0, 0.0, -12.0, 0.0, 2.0])
    rows.append(
        _row("2d. cubic n=6 coefficients = T2(z^3-3z)",
             float(np.abs(np.array(cert6.p_coeffs) - p6_exact).max()), 1e-9)
    )
    rows.append(_row("2e. cubic n=6 residual", cert6.residual, 1e-10))
    return rows


def criterion_3(node_count: int = 256, **_) -> list[dict]:
    E = IntervalSystem((1.0, -1.0))
    mass = ms.equilibrium_measure(E, node_count)
    rows = [_row("3a. arcsine total mass", float(abs(mass[0] - 1.0)), 1e-12)]
    G = ms.green_function(E, 2.0, math.inf, node_count)
    exact = math.log(2.0 + math.sqrt(3.0))
    rows.append(
        _row("3b. single-interval Green at z=2",
             float(abs(G.real - exact) / exact), 1e-9)
    )
    cert = pl.chebyshev_poly(E, 5, node_count)
    t5 = np.array([0.0, 5.0, 0.0, -20.0, 0.0, 16.0])
    rows.append(
        _row("3c. classical degree-5 coefficients",
             float(np.abs(np.array(cert.p_coeffs) - t5).max()), 1e-10)
    )
    return rows


def criterion_4(node_count: int = 512, **_) -> list[dict]:
    from .curve import BranchModel

    rows = []
    for x in (0.37, 0.62):
        model = BranchModel((0.0, x, 1.0), ((0.0, x), (1.0, math.inf)))
        plane = lambda z: 1.0 / model.sqrt(z)
        a = pr.gap_cycle_period(plane, model, 0, node_count)
        b = pr.band_chain_period(plane, model, 0, node_count)
        B = b / a
        oracle = 1j * elliptic_K(math.sqrt(x)) / elliptic_K(math.sqrt(1.0 - x))
        rows.append(
            _row(f"4. g=1 Riemann matrix vs AGM (x={x})",
                 float(abs(B - oracle) / abs(oracle)), 1e-10)
        )
    return rows


def criterion_5(node_count: int = 256, **_) -> list[dict]:
    systems = [
        cubic_preimage_system(),
        IntervalSystem((6.0, 5.0, 3.0, 2.5, 1.0, 0.0)),
        IntervalSystem((10.0, 7.0, 5.0, 4.0, 2.0, 1.0)),
    ]
    rows = []
    for i, E in enumerate(systems):
        A = pr.abel_infinity(E, node_count)
        f = np.asarray(ms.frequency_map(E, node_count).values)
        rows.append(
            _row(f"5. Abel-infinity vs frequencies (system {i + 1})",
                 float(np.abs(A.imag - f).max()), 1e-8)
        )
    return rows


def _fd_derivative_check(cfg: TCurveConfig, node_count: int) -> tuple[float, float]:
    du, dy0 = df.dependent_derivatives(cfg, node_count)
    target = ms.harmonic_partial_sums(cfg, node_count)
    h = 1e-5
    worst_u, worst_y = 0.0, 0.0
    for i in range(cfg.g):
        sols = {}
        for sgn in (+1, -1):
            x2 = list(cfg.x)
            x2[i] += sgn * h
            tmpl = validate_config(x=tuple(x2), u=cfg.u, y0=cfg.y0, sigma=cfg.sigma)
            sol, _ = df.solve_harmonic_config(tmpl, target, node_count)
            sols[sgn] = (np.asarray(sol.u), sol.y0)
        du_fd = (sols[1][0] - sols[-1][0]) / (2 * h)
        dy_fd = (sols[1][1] - sols[-1][1]) / (2 * h)
        worst_u = max(
            worst_u,
            float(np.max(np.abs(du_fd - du[:, i]) / np.maximum(np.abs(du[:, i]), 1e-8))),
        )
        worst_y = max(worst_y, float(abs(dy_fd - dy0[i]) / max(abs(dy0[i]), 1e-8)))
    return worst_u, worst_y


def criterion_6(node_count: int = 256, **_) -> list[dict]:
    rows = []
    for cfg, label in ((reference_config_g2(), "g=2"), (reference_config_g3(), "g=3")):
        wu, wy = _fd_derivative_check(cfg, node_count)
        rows.append(_row(f"6a. du/dx vs FD ({label})", wu, 1e-6))
        rows.append(_row(f"6b. dy0/dx vs FD ({label})", wy, 1e-6))
        # explicit cross-check of the two closed forms
        om = pr.omega_third_kind(cfg, node_count)
        du, dy0 = df.dependent_derivatives(cfg, node_count)
        vs = pr.v_basis(cfg)
        pts = cfg.branch_points
        worst = 0.0
        for i in range(cfg.g):
            ii = pts.index(cfg.x[i])
            om_x = pr.rep_eval_branch(om.rep, ii)
            for m in range(cfg.g - 1):
                mm = pts.index(cfg.u[m])
                alt = -(om_x / pr.rep_eval_branch(om.rep, mm)) * pr.rep_eval_branch(
                    vs[m], ii
                )
                worst = max(worst, abs(alt - du[m, i]))
            alt_y = -0.25 * om_x * pr.rep_eval_branch(vs[-1], ii)
            worst = max(worst, abs(alt_y - dy0[i]))
        rows.append(_row(f"6c. residue-form vs v-form agreement ({label})", worst, 1e-9))
    return rows


def criterion_7(node_count: int = 256, **_) -> list[dict]:
    rows = []
    cfg2, cfg3 = reference_config_g2(), reference_config_g3()
    worst2 = max(
        sc.verify_schlesinger(cfg2, i=i, h=1e-4, node_count=node_count)["max_defect"]
        for i in range(cfg2.g)
    )
    rows.append(_row("7a. constrained-Schlesinger FD residual (g=2)", worst2, 1e-6))
    worst3 = max(
        sc.verify_schlesinger(cfg3, i=i, h=1e-4, node_count=node_count)["max_defect"]
        for i in range(cfg3.g)
    )
    rows.append(_row("7b. constrained-Schlesinger FD residual (g=3)", worst3, 1e-5))
    r_big = sc.verify_schlesinger(cfg2, i=0, h=8e-4, node_count=node_count)["max_defect"]
    r_small = sc.verify_schlesinger(cfg2, i=0, h=4e-4, node_count=node_count)["max_defect"]
    rows.append(
        _row("7c. second-order decay ratio under h halving", r_big / r_small, 2.0,
             larger_ok=True)
    )
    return rows


def criterion_8(node_count: int = 256, **_) -> list[dict]:
    cfg = reference_config_g2()
    rows = []
    rs = sc.residue_matrices(cfg, node_count=node_count)
    dets = [np.linalg.det(m) for m in rs.matrices()]
    rows.append(
        _row("8a. det A = -1/16", float(np.abs(np.array(dets) + 1.0 / 16.0).max()),
             1e-12)
    )
    ic = sc.identity_checks(cfg, node_count=node_count)
    rows.append(_row("8b. sum A12 = 0", ic["a12_sum"], 1e-10))
    rows.append(_row("8c. sum beta = -t", ic["beta_sum"], 1e-10))
    rows.append(_row("8d. sum A21 = 0", ic["a21_sum"], 1e-10))
    asum = sum(rs.matrices())
    rows.append(
        _row("8e. A_infinity = diag(-1/4, 1/4)",
             float(np.abs(asum - np.diag([-0.25, 0.25])).max()), 1e-10)
    )
    om = pr.omega_third_kind(cfg, node_count)
    base = pr.a12_values(cfg, om, 1.0)
    worst = 0.0
    for t in (2.0 + 0j, 1j):
        rs_t = sc.residue_matrices(cfg, t, node_count=node_count, omega=om)
        worst = max(worst, float(np.abs(rs_t.A12 - t * base).max()))
        worst = max(worst, float(np.abs(rs_t.A11 - rs.A11).max()))
        worst = max(worst, float(np.abs(rs_t.A21 - rs.A21 / t).max()))
    rows.append(_row("8f. t-covariance over t in {1, 2, i}", worst, 1e-12))
    return rows


def criterion_9(node_count: int = 256, seed: int = DEFAULT_SEED, **_) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    for g in (2, 3):
        for trial in range(2):
            cfg = random_config(rng, g)
            ic = sc.identity_checks(cfg, node_count=node_count)
            keys = [k for k in ic if k.startswith(("res0", "res1", "res2", "res3", "res4"))]
            worst = max(ic[k] for k in keys)
            rows.append(
                _row(f"9. residue-sum identities (g={g}, trial {trial + 1})",
                     worst, 1e-9)
            )
    return rows


def criterion_10(node_count: int = 256, **_) -> list[dict]:
    E0 = cubic_preimage_system()
    c = np.array(sorted(E0.endpoints))
    c = (c - c[0]) / (c[1] - c[0])
    Eh = IntervalSystem(tuple(sorted(c, reverse=True)))
    cfg0, _ = moebius_normalize(Eh, ("l", "l"))
    x_hat = [Eh.bands[1][0], Eh.bands[2][0]]
    path = df.integrate_path(
        cfg0, np.array(x_hat) * np.array([1.05, 0.98]), 100,
        policy="equilibrium", node_count=node_count,
    )
    hm0 = ms.harmonic_measures_config(path.configs[0], node_count)
    worst = max(
        float(np.abs(ms.harmonic_measures_config(cfg, node_count) - hm0).max())
        for cfg in path.configs[1:]
    )
    rows = [
        _row("10a. harmonic measures constant along 100-step path", worst, 1e-9)
    ]
    rep = cb.rectification_check(path, node_count)
    rows.append(_row("10b. comb base drift", rep["q_drift"], 1e-8))
    rows.append(_row("10c. slit-height change", rep["h_change"], 1e-3, larger_ok=True))
    return rows


def five_periodic_support(node_count: int = 256) -> IntervalSystem:
    """Support with frequencies (2/5, 4/5) and fixed interval [0, 1]."""
    E0 = cubic_preimage_system()
    c = np.array(sorted(E0.endpoints))
    c = (c - c[0]) / (c[1] - c[0])
    Eh = IntervalSystem(tuple(sorted(c, reverse=True)))
    sig = ("l", "l")
    x_hat = [Eh.bands[1][0], Eh.bands[2][0]]
    u = np.array([Eh.bands[1][1], Eh.bands[2][1]])
    f0, f1 = np.array([1 / 3, 2 / 3]), np.array([0.4, 0.8])
    for t in np.linspace(0.1, 1.0, 10):
        tgt = (1 - t) * f0 + t * f1
        u = df.invert_frequencies(
            {"x": x_hat, "sigma": sig, "y0": "pinned-infinity"}, tgt, u,
            node_count=node_count,
        )
    return hat_system(x_hat, u, sig)


def criterion_11(node_count: int = 256, seed: int = DEFAULT_SEED, **_) -> list[dict]:
    E5 = five_periodic_support(node_count)
    cert = pl.chebyshev_poly(E5, 5, node_count)
    rows = [
        _row("11a. n=5 Pell residual of the deformed support", cert.residual, 1e-8),
        _row("11b. signature = (0,1,1)",
             0.0 if cert.signature == (0, 1, 1) else 1.0, 0.5),
    ]
    bc = bl.billiard_from_intervals(E5, ("l", "l"))
    traj = bl.simulate(bc, n_bounces=5, seed=seed % 97)
    rows.append(_row("11c. 5-periodic closure gap", traj.closure_gap, 1e-6))
    rows.append(
        _row("11d. winding = (5,4,2)",
             0.0 if traj.winding == (5, 4, 2) else 1.0, 0.5)
    )
    cfgs, rep = bl.deform_billiard(
        bc, (bc.b[0] * 1.01, bc.b[1] * 0.995), steps=3, node_count=node_count
    )
    rows.append(
        _row("11e. Pell residual after billiard deformation",
             max(rep["pell_residuals"]), 1e-8)
    )
    traj2 = bl.simulate(cfgs[-1], n_bounces=5, seed=(seed + 1) % 97)
    rows.append(_row("11f. deformed closure gap", traj2.closure_gap, 1e-6))
    rows.append(
        _row("11g. deformed winding = (5,4,2)",
             0.0 if traj2.winding == (5, 4, 2) else 1.0, 0.5)
    )
    return rows


def criterion_12(seed: int = DEFAULT_SEED, node_count: int = 256, **_) -> list[dict]:
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(24):
        n = int(rng.integers(1, 7))
        z = rng.uniform(-2, 2, n)
        y = rng.uniform(-2, 2, n)
        lhs = sum(
            math.comb(n, k) * bell_L(k, z[:k]) * bell_L(n - k, y[: n - k])
            for k in range(n + 1)
        )
        rhs = bell_L(n, z + y)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1.0))
    rows = [_row("12a. binomial relation for the partition polynomials", worst, 1e-12)]

    cfg = reference_config_g2()
    worst_fd = 0.0
    for l in (1, 2):
        exact = phi_inv_derivative(cfg, l)
        # second differences at 1e-5 would sit on the eps/h^2 noise floor
        h = 1e-5 if l == 1 else 1e-3

        def f_inv(y):
            c2 = validate_config(x=cfg.x, u=cfg.u, y0=y, sigma=cfg.sigma)
            return 1.0 / phi_q0(c2)

        if l == 1:
            fd = (f_inv(cfg.y0 + h) - f_inv(cfg.y0 - h)) / (2 * h)
            fd4 = (f_inv(cfg.y0 + h / 2) - f_inv(cfg.y0 - h / 2)) / h
            fd = (4 * fd4 - fd) / 3.0
        else:
            fd = (f_inv(cfg.y0 + h) - 2 * f_inv(cfg.y0) + f_inv(cfg.y0 - h)) / h**2
            fd4 = (
                f_inv(cfg.y0 + h / 2) - 2 * f_inv(cfg.y0) + f_inv(cfg.y0 - h / 2)
            ) / (h / 2) ** 2
            fd = (4 * fd4 - fd) / 3.0
        worst_fd = max(worst_fd, abs(fd - exact) / max(abs(exact), 1e-12))
    rows.append(_row("12b. derivative identity for 1/phi vs FD", worst_fd, 1e-6))
    return rows


ALL_CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
]


def run_all(node_count: int = 256, seed: int = DEFAULT_SEED) -> list[dict]:
    rows = []
    for crit in ALL_CRITERIA:
        rows.extend(crit(node_count=node_count, seed=seed))
    return rows
