import math

import numpy as np
import pytest

from automation_risk import (Linear, Quadratic, RiskModel, SeverityDistribution, SimConfig,
                             simulate_incidents)
from automation_risk.errors import DomainError
from automation_risk.simulation import (IncidentDataset, ObservationalConfig,
                                        generate_observational, record_uniforms)


def credit():
    return RiskModel(0.03, Linear(0.1, 0.15, 0.9, 0.85), 50_000.0)


def test_uniforms_are_open_interval_and_addressable():
    u = record_uniforms(5, 0, 1000, 2)
    assert u.shape == (1000, 8)
    assert u.min() > 0.0 and u.max() < 1.0
    np.testing.assert_array_equal(record_uniforms(5, 400, 410, 2), u[400:410])


def test_chunking_is_bit_identical():
    cfg = SimConfig(credit(), 0.9, 12_345, 8)
    full = simulate_incidents(cfg)
    chunked = simulate_incidents(cfg, chunk_size=1000)
    np.testing.assert_array_equal(full.dataset.loss, chunked.dataset.loss)
    np.testing.assert_array_equal(full.dataset.failed, chunked.dataset.failed)


def test_same_seed_same_data_and_different_seed_differs():
    a = simulate_incidents(SimConfig(credit(), 0.5, 50_000, 1))
    b = simulate_incidents(SimConfig(credit(), 0.5, 50_000, 1))
    c = simulate_incidents(SimConfig(credit(), 0.5, 50_000, 2))
    assert a.mean_loss == b.mean_loss
    assert not np.array_equal(a.dataset.failed, c.dataset.failed)


def test_prefix_stability():
    # the first n records do not depend on how many are drawn
    small = simulate_incidents(SimConfig(credit(), 0.5, 1000, 4))
    big = simulate_incidents(SimConfig(credit(), 0.5, 5000, 4))
    np.testing.assert_array_equal(small.dataset.harmed, big.dataset.harmed[:1000])


def test_seed_validation():
    for bad in (-1, 2**64, 1.5, True, "7"):
        with pytest.raises(DomainError):
            SimConfig(credit(), 0.5, 10, bad)


def test_zero_failure_rate_gives_zero_loss():
    res = simulate_incidents(SimConfig(credit().replace(p_failure=0.0), 0.9, 1000, 0))
    assert res.mean_loss == 0.0 and res.n_failed == 0 and math.isnan(res.p_harm_given_failure)


@pytest.mark.parametrize("trial", range(20))
def test_random_models_agree_with_decomposition(trial):
    rng = np.random.default_rng(trial)
    family = ["point", "exponential", "lognormal"][trial % 3]
    mean = float(rng.uniform(10.0, 1e4))
    dist = SeverityDistribution(family, mean, 0.7 if family == "lognormal" else 0.0)
    c2 = float(rng.uniform(0.0, 0.5))
    risk = RiskModel(float(rng.uniform(0.02, 0.5)), Quadratic(float(rng.uniform(0, 0.3)),
                     float(rng.uniform(0, 0.2)), c2), mean, dist)
    a = float(rng.uniform(0.0, 1.0))
    res = simulate_incidents(SimConfig(risk, a, 200_000, 1000 + trial))
    assert abs(res.z_score) < 4.5
    assert res.p_harm_given_failure == res.p_exec_given_failure
    ds = res.dataset
    assert np.all(ds.harmed <= ds.executed) and np.all(ds.executed <= ds.failed)


def test_csv_round_trip(tmp_path):
    ds = generate_observational(ObservationalConfig(n=500, seed=3))
    path = tmp_path / "d.csv"
    ds.to_csv(path)
    back = IncidentDataset.from_csv(path, treated_groups=ds.treated_groups,
                                    post_start=ds.post_start, rd_cutoff=ds.rd_cutoff)
    for name in ("failed", "harmed", "a_level", "covariate", "instrument", "group", "time",
                 "running_var", "loss"):
        np.testing.assert_array_equal(getattr(back, name), getattr(ds, name))
    back.to_csv(tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_bytes() == path.read_bytes()


def test_csv_keeps_signed_zero(tmp_path):
    ds = generate_observational(ObservationalConfig(n=20, seed=3))
    ds.covariate[0] = -0.0
    ds.to_csv(tmp_path / "z.csv")
    back = IncidentDataset.from_csv(tmp_path / "z.csv")
    assert math.copysign(1.0, back.covariate[0]) == -1.0


def test_dataset_rejects_inconsistent_records():
    n = 3
    cols = dict(failed=[0, 1, 1], executed=[1, 1, 0], harmed=[0, 1, 0], loss=[0, 1, 0],
                a_level=np.zeros(n), covariate=np.zeros(n), instrument=np.zeros(n),
                group=np.zeros(n), time=np.zeros(n), running_var=np.zeros(n))
    with pytest.raises(DomainError):
        IncidentDataset(**cols)
    cols["executed"] = [0, 1, 0]
    cols["loss"] = [0, 1, 5]
    with pytest.raises(DomainError):
        IncidentDataset(**cols)


def test_observational_panel_layout():
    cfg = ObservationalConfig(n=600, seed=1)
    ds = generate_observational(cfg)
    counts = np.zeros((cfg.n_groups, cfg.n_periods), int)
    np.add.at(counts, (ds.group, ds.time), 1)
    assert counts.min() == counts.max() == 10
    assert ds.treated_groups == (0, 1, 2, 3, 4) and ds.post_start == 3
    assert np.all((ds.running_var >= -1) & (ds.running_var <= 1))


def test_saturation_warning():
    ds = generate_observational(ObservationalConfig(n=2000, automation_mean=0.95,
                                                    instrument_strength=0.3, seed=0))
    assert ds.degenerate and "saturates" in ds.warnings[0]
    assert not generate_observational(ObservationalConfig(n=2000, seed=0)).degenerate
