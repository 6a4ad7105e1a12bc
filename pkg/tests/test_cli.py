import csv
import io
import json
from pathlib import Path

import pytest

from hadamard_weak.cli import EXPERIMENT_NAMES, main
from hadamard_weak.report import REPORT_KEYS

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main([*args, "--output", str(out)])
    return code, (out.read_text() if out.exists() else None)


def test_every_experiment_has_a_sample_config():
    assert sorted(p.stem for p in CONFIGS.glob("*.json")) == sorted(EXPERIMENT_NAMES)


def test_weakconv_report(tmp_path):
    code, text = run(["weakconv", "--config", str(CONFIGS / "weakconv.json")], tmp_path)
    assert code == 0
    report = json.loads(text)
    assert tuple(sorted(report)) == tuple(sorted(REPORT_KEYS))
    assert report["verdict"] == "ConvergedWithin(1e-06, 11)"
    assert report["traces"]["strong"] == [float(n) for n in range(1, 51)]
    assert report["config"]["space"] == {"kind": "spike", "branches": 50}


def test_book_witness_report(tmp_path):
    code, text = run(["book-witness", "--config", str(CONFIGS / "book-witness.json")], tmp_path)
    assert code == 0
    report = json.loads(text)
    (w,) = report["witnesses"]
    assert w["kind"] == "TwNeTgWitness" and w["values"]["n"] == 2.0


def test_preimage_identity_report(tmp_path):
    code, text = run(
        ["preimage-identity", "--config", str(CONFIGS / "preimage-identity.json"), "--param", "samples=500"], tmp_path
    )
    assert code == 0
    report = json.loads(text)
    assert report["mismatches"] == [] and report["config"]["params"]["samples"] == 500


def test_run_prefix_is_accepted(tmp_path):
    code, _ = run(["run", "project", "--config", str(CONFIGS / "project.json")], tmp_path)
    assert code == 0


def test_expected_none_but_found_exits_1(tmp_path):
    code, text = run(
        [
            "property-search",
            "--config",
            str(CONFIGS / "property-search.json"),
            "--param",
            'expect="none"',
            "--param",
            "budget=2000",
        ],
        tmp_path,
    )
    assert code == 1 and json.loads(text)["witnesses"]


def test_seed_flag_overrides_config(tmp_path):
    cfg = CONFIGS / "property-search.json"
    _, a = run(["property-search", "--config", str(cfg), "--param", "budget=1500", "--seed", "3"], tmp_path, "a.json")
    _, b = run(["property-search", "--config", str(cfg), "--param", "budget=1500"], tmp_path, "b.json")
    assert json.loads(a)["config"]["seed"] == 3 and json.loads(b)["config"]["seed"] == 7
    assert a != b


@pytest.mark.parametrize(
    "args",
    [
        ["property-search", "--config", str(CONFIGS / "book-witness.json")],  # experiment mismatch
        ["weakconv", "--config", "/nonexistent/config.json"],
        ["weakconv"],  # no space
        ["book-witness", "--config", str(CONFIGS / "book-witness.json"), "--param", 'probes=["C5"]'],
        ["weakconv", "--config", str(CONFIGS / "weakconv.json"), "--param", "epsilon=-1"],
        ["cone-cover", "--config", str(CONFIGS / "cone-cover.json"), "--param", "eps=0"],
        ["weakconv", "--config", str(CONFIGS / "weakconv.json"), "--param", "oops"],
        ["nonsense-experiment"],
    ],
)
def test_input_errors_exit_2(args, tmp_path, capsys):
    assert main(args) == 2


def test_randomized_experiment_requires_seed(tmp_path):
    cfg = json.loads((CONFIGS / "convex-complement.json").read_text())
    del cfg["seed"]
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["convex-complement", "--config", str(path)]) == 2


def test_unwritable_output_exits_2(tmp_path):
    assert main(["project", "--config", str(CONFIGS / "project.json"), "--output", str(tmp_path / "no" / "x.json")]) == 2


def test_csv_rows(tmp_path):
    code, text = run(["weakconv", "--config", str(CONFIGS / "weakconv.json"), "--format", "csv"], tmp_path, "o.csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 10 * 50
    assert set(rows[0]) == {"probe", "index", "projected_distance", "strong_distance"}
    assert rows[0]["index"] == "1" and rows[49]["strong_distance"] == "50.0"


def test_stdout_when_no_output(capsys):
    assert main(["project", "--config", str(CONFIGS / "project.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["metadata"]["summary"]["t"] == 1.0


def test_thread_count_does_not_change_bytes(tmp_path):
    cfg = str(CONFIGS / "cone-cover.json")
    _, a = run(["cone-cover", "--config", cfg, "--param", "testers=30"], tmp_path, "a.json")
    _, b = run(["cone-cover", "--config", cfg, "--param", "testers=30", "--threads", "4"], tmp_path, "b.json")
    assert a == b


def test_version(capsys):
    assert main(["--version"]) == 0
    assert "hadamard-weak" in capsys.readouterr().out
