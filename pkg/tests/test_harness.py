import csv
import json

import numpy as np
import pytest

from listdec import codes
from listdec._helpers import derive_seed
from listdec.errors import InputError
from listdec.gf import field_make
from listdec.harness import ExperimentConfig, ExperimentRunner, load_config, run_chain_trial
from listdec.harness.cli import csv_columns, export_records_csv, export_records_json
from listdec.harness.core import VERDICTS, violations


def _by_quantity(records):
    return {r.quantity: r.value for r in records}


def test_derive_seed():
    assert derive_seed(1, 0) == derive_seed(1, 0)
    assert derive_seed(1, 0) != derive_seed(1, 1)
    assert derive_seed(1, 0) != derive_seed(0, 1)
    assert derive_seed(-1, 3) == derive_seed(2**64 - 1, 3)
    assert 0 <= derive_seed(123, 456) < 2**64


def test_config_defaults_and_validation():
    config = ExperimentConfig("reduction_chain", seed=1, params={"trials": 3})
    assert config.params["trials"] == 3
    assert config.params["L"] == 3
    with pytest.raises(InputError):
        ExperimentConfig("unknown", seed=1)
    with pytest.raises(InputError):
        ExperimentConfig("reduction_chain", seed=1, params={"bogus": 1})
    with pytest.raises(InputError):
        ExperimentConfig("reduction_chain", seed=None)


def test_load_config(tmp_path):
    path = tmp_path / "chain.json"
    path.write_text(json.dumps({"experiment": "moment_audit", "seed": 4, "params": {"trials": 2}}))
    config = load_config(path)
    assert (config.experiment, config.seed) == ("moment_audit", 4)
    assert config.params["trials"] == 2

    path.write_text(json.dumps({"experiment": "moment_audit"}))
    with pytest.raises(InputError):
        load_config(path)
    path.write_text("{not json")
    with pytest.raises(InputError):
        load_config(path)


def test_chain_trial_on_rank_deficient_generator():
    entries = np.random.default_rng(0).integers(0, 2, size=(3, 12))
    entries[1] = entries[0]
    gen = codes.GeneratorMatrix(field_make(2), entries)
    records = run_chain_trial(gen, 3, trial=0, seed=9)
    values = _by_quantity(records)
    assert values["duplicate_codewords"] == 4
    assert values["rip_constant"] >= 1 - 1e-9
    assert values["dft_equivalence_error"] <= 1e-12
    assert all(values[name] == 1 for name in VERDICTS if name in values)
    assert {r.derived_seed for r in records} == {9}


def test_reduction_chain_has_no_violations():
    config = ExperimentConfig("reduction_chain", seed=2024, params={"trials": 10})
    records = ExperimentRunner(config).run()
    assert violations(records) == 0
    assert not any(r.is_error() for r in records)
    assert sorted({r.trial for r in records}) == list(range(10))
    for r in records:
        assert r.derived_seed == derive_seed(2024, r.trial)


def test_reduction_chain_rejects_large_L():
    config = ExperimentConfig("reduction_chain", seed=1, params={"L": 7})
    with pytest.raises(InputError):
        ExperimentRunner(config).run()


def test_johnson_audit_has_no_violations():
    config = ExperimentConfig(
        "johnson_audit", seed=7, params={"trials": 40, "q_values": [3], "n": 6, "ktilde": 2}
    )
    records = ExperimentRunner(config).run()
    assert violations(records) == 0
    assert any(r.quantity == "deletion_holds" for r in records)


def test_johnson_audit_alternates_alphabets():
    config = ExperimentConfig("johnson_audit", seed=3, params={"trials": 20})
    assert config.params["q_values"] == [2, 3]
    records = ExperimentRunner(config).run()
    assert violations(records) == 0
    for r in records:
        assert r.params["q"] == (2 if r.trial % 2 == 0 else 3)

    config = ExperimentConfig("johnson_audit", seed=3, params={"q_values": []})
    with pytest.raises(InputError):
        ExperimentRunner(config).run()


@pytest.mark.slow
def test_johnson_audit_at_default_scale():
    config = ExperimentConfig("johnson_audit", seed=2024)
    assert config.params["trials"] == 1000
    records = ExperimentRunner(config).run()
    assert violations(records) == 0
    assert not any(r.is_error() for r in records)
    assert {r.params["q"] for r in records} == {2, 3}


def test_moment_audit_fractional_entry_bound():
    config = ExperimentConfig(
        "moment_audit", seed=4, params={"trials": 20, "grid_points": 8, "K": 0.5}
    )
    records = ExperimentRunner(config).run()
    assert violations(records) == 0
    bounds_ = [r for r in records if r.quantity == "moment_bound"]
    assert all(r.params["K"] == 0.5 for r in bounds_)
    # (4 * 1/2 * m * s)^s
    assert all(r.value == (2 * r.params["m"] * r.params["s"]) ** r.params["s"] for r in bounds_)


@pytest.mark.parametrize("K", [0, -1, "half"])
def test_moment_audit_rejects_bad_entry_bound(K):
    config = ExperimentConfig("moment_audit", seed=4, params={"trials": 1, "K": K})
    with pytest.raises(InputError):
        ExperimentRunner(config).run()


def test_moment_audit():
    config = ExperimentConfig(
        "moment_audit", seed=3, params={"trials": 30, "grid_points": 1000}
    )
    records = ExperimentRunner(config).run()
    assert violations(records) == 0
    values = _by_quantity(records)
    assert values["delta_sqr_exceptions"] == 0
    assert values["delta_sqr_hypothesis_count"] > 0


def test_rip_scan_records_probes_and_budget_errors():
    config = ExperimentConfig(
        "rip_scan",
        seed=5,
        params={
            "ktilde_values": [2, 3],
            "k_values": [2],
            "confidence_trials": 3,
            "rip_mode": "exact",
        },
    )
    records = ExperimentRunner(config).run()
    mins = [r for r in records if r.quantity == "min_rows"]
    assert [r.params["ktilde"] for r in mins] == [2, 3]
    assert all(r.value >= 1 for r in mins)
    assert any(r.quantity == "success_probability" for r in records)

    config.params["delta_target"] = -1.0
    failed = ExperimentRunner(config).run()
    assert [r.method for r in failed] == ["error", "error"]


@pytest.mark.slow
def test_rip_scan_row_count_grows_slowly_with_ktilde():
    config = ExperimentConfig(
        "rip_scan",
        seed=2024,
        params={
            "q": 2,
            "ktilde_values": [8, 10, 12],
            "k_values": [3],
            "delta_target": 0.5,
            "confidence_trials": 40,
            "rip_mode": "sampled",
        },
    )
    records = ExperimentRunner(config).run()
    assert not any(r.is_error() for r in records)
    rows = {r.params["ktilde"]: r.value for r in records if r.quantity == "min_rows"}
    assert sorted(rows) == [8, 10, 12]
    assert 1.0 <= rows[12] / rows[8] <= 3.0


def test_covering_curve_small():
    config = ExperimentConfig(
        "covering_curve",
        seed=1,
        params={"ktilde": 4, "rows": 8, "k": 3, "m_values": [4, 16, 64], "trials": 5},
    )
    records = ExperimentRunner(config).run()
    errors = [r for r in records if r.quantity == "mean_xprime_error"]
    assert [r.params["m"] for r in errors] == [4, 16, 64]
    assert records[-1].quantity == "loglog_slope"


def test_csv_is_deterministic_across_worker_counts(tmp_path, monkeypatch):
    config = ExperimentConfig("reduction_chain", seed=11, params={"trials": 6})
    outputs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("LISTDEC_THREADS", threads)
        path = tmp_path / f"chain-{threads}.csv"
        export_records_csv(ExperimentRunner(config).run(), "reduction_chain", str(path))
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]

    with open(tmp_path / "chain-1.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == csv_columns("reduction_chain")
    assert all(len(row) == len(rows[0]) for row in rows)
    assert rows[1][-3:-1] == ["dft_equivalence_error", "0.00000000000e+00"]


def test_timing_column(tmp_path):
    config = ExperimentConfig("moment_audit", seed=1, params={"trials": 2, "grid_points": 8})
    records = ExperimentRunner(config).run()
    path = tmp_path / "moments.csv"
    export_records_csv(records, "moment_audit", str(path), include_timing=True)
    header = path.read_text().splitlines()[0]
    assert header.endswith(",method,wall_ms")


def test_json_export(tmp_path):
    config = ExperimentConfig("moment_audit", seed=1, params={"trials": 2, "grid_points": 8})
    records = ExperimentRunner(config).run()
    path = tmp_path / "moments.json"
    export_records_json(records, config, str(path))
    data = json.loads(path.read_text())
    assert data["experiment"] == "moment_audit"
    assert len(data["records"]) == len(records)
    assert "machine" not in data
