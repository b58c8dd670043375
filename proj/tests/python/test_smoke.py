import math

import pytest

import aracusum as ac


def test_llr_and_cusum():
    assert ac.llr_increment(100, 0, 0.01, 0.05) == pytest.approx(-4.12435, abs=1e-4)
    assert ac.llr_increment(100, 5, 0.01, 0.05) == pytest.approx(4.12905, abs=1e-4)
    w = ac.cusum_step([-2.0, 3.0], [100, 100], [5, 5], 0.01, 0.05)
    assert w[0] == pytest.approx(4.12905, abs=1e-4)
    assert w[1] == pytest.approx(7.12905, abs=1e-4)
    assert ac.check_alarm([0.0, 6.6, 1.0], 6.5) == 1
    assert ac.check_alarm([0.0, 0.0], 0.0) is None


def test_posterior_and_planner():
    prior = ac.PriorConfig(1.0, 1.0, 0.3)
    s = ac.posterior_from_history(prior, 1, [[10], [10]], [[1], [2]])
    assert s.alpha[0] == pytest.approx(3.3)
    assert s.beta[0] == pytest.approx(11.7)
    assert ac.reward(2, 3.0, 1.0) == pytest.approx(1.5 + math.sqrt(0.45))
    post = ac.PosteriorState([3.0, 1.0], [1.0, 3.0])
    assert ac.greedy_allocate(post, 2) == [2, 0]
    desk = ac.posterior_init(ac.PriorConfig(19.5, 1930.5, 0.3), 39)
    assert ac.greedy_allocate(desk, 3900) == [100] * 39
    assert ac.even_allocate(3, 5) == [2, 2, 1]
    assert ac.topr_allocate([1.0, 3.0, 3.0, 0.0], 12, 4, 2) == [0, 6, 6, 0]


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        ac.llr_increment(10, 11, 0.01, 0.05)
    with pytest.raises(ValueError):
        ac.ModelParams(3, 0.05, 0.01, 30)
    with pytest.raises(ValueError):
        ac.AllocatorPolicy("random")


def test_simulation_round_trip():
    model = ac.ModelParams(6, 0.01, 0.05, 600, threshold=3.0, hotspots=[0], change_time=0)
    cfg = ac.SimulationConfig(model, ac.PriorConfig(3.0, 297.0, 0.3), replications=50, base_seed=9, threads=1)
    a = ac.monte_carlo(cfg)
    cfg.threads = 2
    b = ac.monte_carlo(cfg)
    assert a.arl == b.arl and a.sdrl == b.sdrl
    assert a.replication_count == 50
    assert 0.0 <= a.detection_precision <= 1.0
    r = ac.run_once(cfg, 3)
    assert r.run_length >= 1


def test_replay(tmp_path):
    path = tmp_path / "rates.csv"
    rows = ["date,A,B"] + [f"2020-06-{d:02d},0.0,0.0" for d in range(1, 11)]
    path.write_text("\n".join(rows) + "\n")
    m = ac.load_rate_matrix(path)
    assert m.region_names == ["A", "B"]
    rep = ac.replay(m, ac.ModelParams(2, 0.01, 0.05, 200, threshold=6.5), ac.AllocatorPolicy("ara"),
                    ac.PriorConfig(1.0, 99.0, 0.3))
    assert not rep.alarmed
    assert rep.days_monitored == 10
    bad = tmp_path / "bad.csv"
    bad.write_text("date,A\n2020-06-01,1.5\n")
    with pytest.raises(ValueError, match="row 1, column 1"):
        ac.load_rate_matrix(bad)
