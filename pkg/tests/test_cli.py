import json
import math
from pathlib import Path

import pandas as pd
import pytest

from app.cli import main
from app.core.config import settings
from app.core.constants import (
    EXIT_INVALID_CONFIG,
    EXIT_OK,
    EXIT_RUNTIME_ERROR,
    TOOL_NAME,
    TOOL_VERSION,
)
from app.repositories.dataset_repository import DatasetRepository


@pytest.fixture
def data_csv(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x0,y\n0.1,1\n0.2,2\n0.8,1\n0.9,2\n", encoding="utf-8")
    return str(path)


ESTIMATE_ARGS = ["--learner", "knn", "--neighbors", "1", "--scheme", "kfold", "--folds", "2"]


def test_bounds_csv(tmp_path):
    out = tmp_path / "bounds.csv"
    code = main(["bounds", "--variant", "vsym", "--n", "100", "--p", "0.1", "--eps", "0.0,0.1",
                 "--output", str(out)])
    assert code == EXIT_OK
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith(f"# tool={TOOL_NAME}")
    assert lines[1].startswith("# config=")
    table = pd.read_csv(out, comment="#")
    assert list(table.columns) == ["eps", "value", "log_value", "branch"]
    assert table["value"].tolist() == pytest.approx([1.0, math.exp(-0.2)])
    assert set(table["branch"]) == {"hoeffding"}


def test_bounds_json_with_config_file(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"bounds": {"variant": "kfold", "n": 100, "k": 10, "vc": 1}}),
                      encoding="utf-8")
    out = tmp_path / "bounds.json"
    code = main(["bounds", "--config", str(config), "--eps", "0.2", "--format", "json",
                 "--output", str(out)])
    assert code == EXIT_OK
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["tool"] == TOOL_NAME
    assert document["config"]["bounds"]["k"] == 10
    row = document["result"]["rows"][0]
    assert row["value"] == pytest.approx(math.exp(-0.8))


def test_bounds_with_tiny_lambda(tmp_path):
    out = tmp_path / "bounds.csv"
    code = main(["bounds", "--variant", "stab-strong", "--n", "100", "--p", "0.1",
                 "--lambda", "1e-170", "--delta", "0", "--eps", "0.0,0.1", "--output", str(out)])
    assert code == EXIT_OK
    table = pd.read_csv(out, comment="#")
    assert table["value"].tolist() == [1.0, 0.0]


def test_estimate_on_two_folds(tmp_path, data_csv):
    out = tmp_path / "estimate.csv"
    code = main(["estimate", "--data", data_csv, *ESTIMATE_ARGS, "--variant", "out",
                 "--output", str(out)])
    assert code == EXIT_OK
    table = pd.read_csv(out, comment="#")
    assert table["variant"].tolist() == ["out"]
    assert table["value"].tolist() == [0.5]
    assert bool(table["exact"].iloc[0])


def test_estimate_is_byte_identical_across_runs(tmp_path):
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        code = main(["estimate", "--config", _synthetic_config(tmp_path), "--learner", "erm",
                     "--scheme", "lpo", "--leave-out", "2", "--variant", "all",
                     "--seed", "3", "--threads", "2", "--output", str(out)])
        assert code == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def _synthetic_config(tmp_path) -> str:
    path = tmp_path / "synthetic.json"
    path.write_text(json.dumps({"dataset": {"synthetic": {"kind": "threshold-noise"}, "n": 10}}),
                    encoding="utf-8")
    return str(path)


def test_invalid_configurations_exit_2(tmp_path, data_csv):
    out = str(tmp_path / "out.csv")
    assert main(["bounds", "--variant", "erm", "--n", "100", "--p", "0.1",
                 "--output", out]) == EXIT_INVALID_CONFIG
    assert main(["estimate", *ESTIMATE_ARGS, "--output", out]) == EXIT_INVALID_CONFIG
    assert main(["estimate", "--data", data_csv, "--learner", "knn", "--scheme", "kfold",
                 "--folds", "3", "--output", out]) == EXIT_INVALID_CONFIG
    assert main(["estimate", "--data", str(tmp_path / "missing.csv"), *ESTIMATE_ARGS,
                 "--output", out]) == EXIT_INVALID_CONFIG
    with pytest.raises(SystemExit):
        main(["estimate", "--scheme", "bootstrap"])


def test_oracle_exit_codes(tmp_path):
    out = tmp_path / "oracle.csv"
    assert main(["oracle-majority", "--max-m", "2", "--max-n", "3", "--output", str(out)]) == 0
    table = pd.read_csv(out, comment="#")
    assert bool(table["passed"].iloc[0])
    assert int(table["matrices_checked"].iloc[0]) == 2 + 4 + 8 + 4 + 16 + 64
    assert main(["oracle-majority", "--max-m", "5", "--output", str(out)]) == EXIT_RUNTIME_ERROR


def test_subag_train_then_predict(tmp_path, data_csv):
    ensemble = tmp_path / "ensemble.json"
    assert main(["subag-train", "--data", data_csv, *ESTIMATE_ARGS, "--aggregation", "majority",
                 "--output", str(ensemble)]) == EXIT_OK
    document = json.loads(ensemble.read_text(encoding="utf-8"))
    assert (document["tool"], document["version"]) == (TOOL_NAME, TOOL_VERSION)
    assert document["config"]["command"] == "subag-train"
    assert document["config"]["scheme"]["k"] == 2
    assert document["ensemble"]["aggregation"] == "majority"

    queries = tmp_path / "queries.csv"
    queries.write_text("x0\n0.12\n0.88\n", encoding="utf-8")
    out = tmp_path / "predictions.csv"
    assert main(["subag-predict", "--ensemble", str(ensemble), "--queries", str(queries),
                 "--output", str(out)]) == EXIT_OK
    assert pd.read_csv(out, comment="#")["prediction"].tolist() == [1, 2]


def test_subag_train_to_cache_reports_tool_and_config(tmp_path, data_csv, monkeypatch, capsys):
    monkeypatch.setattr(settings, "SUBAG_CACHE_DIR", tmp_path / "cache")
    assert main(["subag-train", "--data", data_csv, *ESTIMATE_ARGS]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert (summary["tool"], summary["version"]) == (TOOL_NAME, TOOL_VERSION)
    assert summary["config"]["command"] == "subag-train"
    assert summary["result"]["members"] == 2
    stored = json.loads(Path(summary["result"]["ensemble"]).read_text(encoding="utf-8"))
    assert stored["config"] == summary["config"]


def test_shatter_command(tmp_path):
    out = tmp_path / "shatter.json"
    code = main(["shatter", "--class", "interval", "--points", "0.1,0.2,0.3,0.4",
                 "--max-n", "4", "--format", "json", "--output", str(out)])
    assert code == EXIT_OK
    result = json.loads(out.read_text(encoding="utf-8"))["result"]
    assert result["shatter_coefficient"] == 11
    assert result["declared_vc"] == 2
    assert result["vc_lower_bound"] == 2


def test_select_split_command(tmp_path, data_csv):
    out = tmp_path / "split.csv"
    code = main(["select-split", "--data", data_csv, "--learner", "erm", "--eta", "0.1",
                 "--vc", "1", "--output", str(out)])
    assert code == EXIT_OK
    text = out.read_text(encoding="utf-8")
    assert "# k_star=" in text
    assert pd.read_csv(out, comment="#")["k"].tolist() == [1, 2, 3]


def test_simulate_with_check(tmp_path):
    out = tmp_path / "coverage.csv"
    code = main(["simulate", "--dist", "constant", "--learner", "knn", "--scheme", "kfold",
                 "--folds", "2", "--n", "10", "--replicates", "100", "--ghost", "1000",
                 "--vc", "1", "--eps", "0.1,0.2", "--check", "--output", str(out)])
    assert code == EXIT_OK
    table = pd.read_csv(out, comment="#")
    assert table["freq"].tolist() == [0.0, 0.0]
    assert not table["violation"].any()


def test_schema_and_generate(tmp_path):
    schema = tmp_path / "schema.json"
    assert main(["schema", "--output", str(schema)]) == EXIT_OK
    assert "properties" in json.loads(schema.read_text(encoding="utf-8"))

    out = tmp_path / "generated.csv"
    assert main(["generate", "--dist", "threshold-noise", "--n", "20", "--seed", "1",
                 "--output", str(out)]) == EXIT_OK
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# tool={TOOL_NAME} {TOOL_VERSION}"
    config = json.loads(lines[1][len("# config="):])
    assert config["dataset"]["n"] == 20
    assert config["seed"] == 1
    assert lines[2] == "x0,y"
    data = DatasetRepository().read(out)
    assert data.n == 20
    assert set(data.labels) <= {1, 2}
