import numpy as np
import pytest

import reflectolab as rl


def walk(seed, n, start, scale=1.0):
    rng = np.random.default_rng(seed)
    steps = rng.normal(0.0, scale / np.sqrt(n), size=(n, len(start)))
    return np.vstack([np.asarray(start, dtype=float), np.asarray(start) + np.cumsum(steps, axis=0)])


def test_sm_one_dim_matches_running_max():
    t = rl.uniform_grid(1.0, 512)
    psi = walk(1, 512, [0.0])[:, 0]
    phi, eta = rl.sm_one_dim(t, psi)
    expect = psi + np.maximum(0.0, np.maximum.accumulate(-psi))
    assert np.max(np.abs(phi - expect)) <= 1e-12
    assert np.all(np.diff(eta) >= 0.0)
    with pytest.raises(ValueError):
        rl.sm_one_dim(t, psi - 1.0)


def test_xi_streaming_equals_reference():
    t = rl.uniform_grid(1.0, 200)
    h, _ = rl.sm_one_dim(t, walk(2, 200, [0.3])[:, 0])
    psi = walk(3, 200, [0.0], 2.0)[:, 0]
    fast = rl.xi_map(t, psi, -h, h)
    slow = rl.xi_map(t, psi, -h, h, reference=True)
    assert np.max(np.abs(fast - slow)) <= 1e-10


def test_gps_directions_and_step():
    assert rl.gps_directions([0.5, 0.5]) == [[1.0, -1.0], [-1.0, 1.0]]
    s = rl.gps_step([0.0, 1.0], [-0.2, 0.0], [0.5, 0.5])
    assert s["z_next"] == pytest.approx([0.0, 0.8])
    assert s["eta_incr"] == pytest.approx([0.2, -0.2])
    v = rl.gps_step([0.0, 0.0], [-1.0, -1.0], [0.5, 0.5])
    assert v["gamma"] == pytest.approx(1.0)


def test_gps_solvers_share_the_level_identity():
    t = rl.uniform_grid(1.0, 1024)
    psi = walk(4, 1024, [0.0, 0.0])
    z_exact, _ = rl.gps_esm_2d_exact(t, psi)
    z_disc, y_disc = rl.gps_esm_discrete(t, psi, [0.5, 0.5])
    level = psi.sum(axis=1)
    gamma1 = level + np.maximum(0.0, np.maximum.accumulate(-level))
    assert np.max(np.abs(z_exact.sum(axis=1) - gamma1)) <= 1e-12
    assert np.max(np.abs(z_disc.sum(axis=1) - gamma1)) <= 1e-12
    assert np.all(z_disc >= -1e-12)


def test_valley_containment():
    t = rl.uniform_grid(1.0, 1024)
    z, y = rl.valley_esm(t, walk(5, 1024, [0.0, 0.0]), [2.0, 2.0, 1.0, 1.0])
    assert np.all(z[:, 1] >= 0.0)
    assert np.all(np.abs(z[:, 0]) <= z[:, 1] ** 2 + 1e-9)
    assert np.all(np.diff(y[:, 1]) >= 0.0)


def test_simulate_bundle_algebra_and_determinism():
    a = rl.simulate("gps", [0.5, 0.5], [0.0, 0.0], horizon=1.0, steps=1024, seed=9)
    b = rl.simulate("gps", [0.5, 0.5], [0.0, 0.0], horizon=1.0, steps=1024, seed=9)
    assert np.array_equal(a["Z"], a["X"] + a["Y"])
    assert np.array_equal(a["Z"], b["Z"])
    with pytest.raises(ValueError):
        rl.simulate("gps", [0.5, 0.6], [0.0, 0.0])


def test_variation_of_a_line():
    t = rl.uniform_grid(1.0, 256)
    assert rl.p_variation_sum(t, t, np.linspace(0.0, 1.0, 17), 1.0) == pytest.approx(1.0)
    assert rl.variation_ladder(t, t, 2, 4, 2.0) == pytest.approx([0.25, 0.125, 0.0625])


def test_small_experiments():
    r = rl.hitting_probability(eps=0.25, n_paths=500, steps=1024, seed=3)
    assert abs(r["estimate"] - 0.25) <= 4 * r["std_error"]
    assert rl.xi_oracle_check(128, 10, 1) <= 1e-10
    b = rl.blowup(n_paths=8, grid_exponent=10, min_level=4, max_level=10)
    assert len(b["origin_tv"]["medians"]) == 7


def test_cli_round_trip(tmp_path):
    code, out, _ = rl.run_cli(["xi-check", "--n", "64", "--cases", "4", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / out.strip().split("/")[-1] / "result.json").exists()
    code, _, err = rl.run_cli([])
    assert code == 2 and "usage" in err
