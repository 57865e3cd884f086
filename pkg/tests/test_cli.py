import json

from click.testing import CliRunner
from support import GOLDEN_ROOT, NEGATIVE_ROOT

from qpac.cli import (
    FEATURE_KEYS,
    emit_report,
    feature_records,
    main,
    pair_features,
    report_from_json,
)
from qpac.detectors import detect_all
from qpac.pairio import load_pair
from qpac.semantics import build_context


def _paths(name, root=GOLDEN_ROOT):
    case = root / name
    return str(case / "buggy.py"), str(case / "fixed.py")


def _run(*args):
    return CliRunner().invoke(main, list(args))


def _golden_report(name):
    buggy, fixed = _paths(name)
    ctx = build_context(load_pair(buggy, fixed))
    return ctx, detect_all(ctx)


# ---------------------------------------------------------------------------
# detect command


def test_detect_json_reports_unequal_bits():
    buggy, fixed = _paths("register_size_mismatch")
    result = _run("detect", "--buggy", buggy, "--fixed", fixed, "--format", "json")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    verdicts = {p["id"]: p["detected"] for p in payload["patterns"]}
    assert verdicts["unequal_bits"] is True
    assert sum(verdicts.values()) == 1
    assert result.stdout.endswith("\n")


def test_detect_identical_files_all_false_exit_zero(tmp_path):
    source = "qc = QuantumCircuit(2)\nqc.h(0)\n"
    for name in ("buggy.py", "fixed.py"):
        (tmp_path / name).write_text(source)
    result = _run(
        "detect", "--buggy", str(tmp_path / "buggy.py"), "--fixed", str(tmp_path / "fixed.py"),
        "--format", "json",
    )
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert all(not p["detected"] for p in payload["patterns"])


def test_detect_unreadable_path_exits_two(tmp_path):
    (tmp_path / "fixed.py").write_text("")
    result = _run(
        "detect", "--buggy", str(tmp_path / "missing.py"), "--fixed", str(tmp_path / "fixed.py"),
    )
    assert result.exit_code == 2
    assert "missing.py" in result.stderr


def test_detect_parse_failure_exits_two(tmp_path):
    (tmp_path / "buggy.py").write_text("qc.h(0\n")
    (tmp_path / "fixed.py").write_text("qc.h(0)\n")
    result = _run(
        "detect", "--buggy", str(tmp_path / "buggy.py"), "--fixed", str(tmp_path / "fixed.py"),
        "--format", "json",
    )
    assert result.exit_code == 2
    assert json.loads(result.stdout)["unanalyzable"] is True


def test_detect_unknown_pattern_id_is_usage_error():
    buggy, fixed = _paths("gate_index_change")
    result = _run("detect", "--buggy", buggy, "--fixed", fixed, "--patterns", "bogus")
    assert result.exit_code == 64


def test_detect_patterns_subset_restricts_output_only():
    buggy, fixed = _paths("register_size_mismatch")
    subset = _run(
        "detect", "--buggy", buggy, "--fixed", fixed, "--format", "json",
        "--patterns", "unequal_bits,incorrect_measurement",
    )
    payload = json.loads(subset.stdout)
    assert [p["id"] for p in payload["patterns"]] == ["unequal_bits", "incorrect_measurement"]
    assert payload["patterns"][0]["detected"] is True


def test_detect_text_format():
    buggy, fixed = _paths("gate_substitution_renamed")
    result = _run("detect", "--buggy", buggy, "--fixed", fixed, "--format", "text")
    assert result.exit_code == 0
    assert "incorrect_standard_gate" in result.stdout
    assert "DETECTED" in result.stdout


def test_detect_gate_table_override(tmp_path, monkeypatch):
    # Without "x" in the table, the h->x substitution is no longer a
    # standard-gate change.
    table = tmp_path / "gates.txt"
    table.write_text("h\n")
    monkeypatch.setenv("QPAC_GATE_TABLE", str(table))
    buggy, fixed = _paths("gate_substitution")
    result = _run("detect", "--buggy", buggy, "--fixed", fixed, "--format", "json")
    payload = json.loads(result.stdout)
    verdicts = {p["id"]: p["detected"] for p in payload["patterns"]}
    assert verdicts["incorrect_standard_gate"] is False


# ---------------------------------------------------------------------------
# corpus command


def test_corpus_golden_exits_zero():
    result = _run("corpus", str(GOLDEN_ROOT), "--format", "json")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["cases"] == 11
    assert payload["mismatches"] == 0
    assert payload["case_diffs"] == []


def test_corpus_negative_exits_zero():
    result = _run("corpus", str(NEGATIVE_ROOT))
    assert result.exit_code == 0


def test_corpus_counts_sum_to_cases():
    result = _run("corpus", str(GOLDEN_ROOT), "--format", "json")
    payload = json.loads(result.stdout)
    for counts in payload["per_pattern"].values():
        assert sum(counts.values()) == payload["cases"]


def test_corpus_wrong_label_exits_one(tmp_path):
    case = tmp_path / "case"
    case.mkdir()
    (case / "buggy.py").write_text("qc = QuantumCircuit(2)\nqc.h(0)\n")
    (case / "fixed.py").write_text("qc = QuantumCircuit(2)\nqc.h(1)\n")
    (case / "expected.json").write_text(json.dumps({"patterns": ["excessive_measurement"]}))
    result = _run("corpus", str(tmp_path), "--format", "json")
    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert payload["mismatches"] == 1
    (diff,) = payload["case_diffs"]
    assert diff["expected"] == ["excessive_measurement"]
    assert diff["detected"] == ["incorrect_initialization"]


def test_corpus_empty_root_exits_zero(tmp_path):
    result = _run("corpus", str(tmp_path), "--format", "json")
    assert result.exit_code == 0
    assert json.loads(result.stdout)["cases"] == 0


def test_corpus_missing_root_exits_two(tmp_path):
    result = _run("corpus", str(tmp_path / "nope"))
    assert result.exit_code == 2


def test_corpus_malformed_case_reported(tmp_path):
    case = tmp_path / "case"
    case.mkdir()
    (case / "buggy.py").write_text("")
    result = _run("corpus", str(tmp_path), "--format", "json")
    assert result.exit_code == 1
    payload = json.loads(result.stdout)
    assert payload["errors"][0]["case"] == "case"


# ---------------------------------------------------------------------------
# features command


def test_features_loop_reduction_delta(tmp_path):
    out = tmp_path / "features.ndjson"
    result = _run("features", str(GOLDEN_ROOT), "--out", str(out))
    assert result.exit_code == 0
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(records) == 11 * 7
    by_pair = {}
    for record in records:
        by_pair.setdefault(record["pair_id"], []).append(record)
    loop_records = by_pair["measure_loop_reduction"]
    assert all(r["features"]["measure_count_delta"] == -5 for r in loop_records)
    opaque_records = by_pair["opaque_to_composite"]
    assert all(r["features"]["opaque_delta"] == 1 for r in opaque_records)
    assert all(r["features"]["composite_delta"] == 1 for r in opaque_records)
    detected = {r["pattern"]: r["detected"] for r in loop_records}
    assert detected["excessive_measurement"] is True
    assert sum(detected.values()) == 1


def test_features_schema_is_stable(tmp_path):
    out = tmp_path / "features.ndjson"
    result = _run("features", str(NEGATIVE_ROOT), "--out", str(out))
    assert result.exit_code == 0
    for line in out.read_text().splitlines():
        record = json.loads(line)
        assert tuple(record["features"].keys()) == FEATURE_KEYS
        assert list(record) == ["pair_id", "pattern", "detected", "features"]


def test_features_identical_files_all_zero(tmp_path):
    corpus = tmp_path / "corpus"
    case = corpus / "same"
    case.mkdir(parents=True)
    source = "qc = QuantumCircuit(2, 2)\nqc.h(0)\nqc.measure(0, 0)\n"
    (case / "buggy.py").write_text(source)
    (case / "fixed.py").write_text(source)
    out = tmp_path / "out.ndjson"
    result = _run("features", str(corpus), "--out", str(out))
    assert result.exit_code == 0
    for line in out.read_text().splitlines():
        record = json.loads(line)
        deltas = {
            k: v
            for k, v in record["features"].items()
            if k.endswith("_delta") or k == "hadamard_parity_flips"
        }
        assert all(v == 0 for v in deltas.values())
        assert record["features"]["circuit_count"] == 1


def test_features_unwritable_out_exits_two(tmp_path):
    result = _run("features", str(GOLDEN_ROOT), "--out", str(tmp_path / "nodir" / "x.ndjson"))
    assert result.exit_code == 2


def test_pair_features_values():
    ctx, _report = _golden_report("measure_loop_reduction")
    features = pair_features(ctx)
    assert features["measure_count_delta"] == -5
    assert features["circuit_count"] == 1
    assert features["register_count"] == 2


def test_feature_records_seven_per_case():
    ctx, report = _golden_report("gate_index_change")
    records = feature_records(ctx, report)
    assert len(records) == 7
    assert all(r["features"] == records[0]["features"] for r in records)


# ---------------------------------------------------------------------------
# emit_report / report_from_json


def test_emit_all_false_report_shape():
    _ctx, report = _golden_report("folded_index_noop")
    payload = json.loads(emit_report(report, "json"))
    assert list(payload) == ["pair_id", "unanalyzable", "classes_considered", "patterns", "warnings"]
    assert len(payload["patterns"]) == 7
    assert all(p["detected"] is False for p in payload["patterns"])


def test_emit_report_evidence_lines():
    _ctx, report = _golden_report("gate_index_change")
    payload = json.loads(emit_report(report, "json"))
    verdict = next(p for p in payload["patterns"] if p["id"] == "incorrect_initialization")
    assert [(e["file"], e["line"]) for e in verdict["evidence"]] == [
        ("buggy", 2),
        ("fixed", 2),
    ]


def test_report_json_round_trip():
    for name in ("gate_index_change", "folded_index_noop", "measure_variant_change"):
        _ctx, report = _golden_report(name)
        assert report_from_json(emit_report(report, "json")) == report


def test_report_round_trip_preserves_pruned_notes():
    from support import pair_from_sources

    report = detect_all(build_context(pair_from_sources("x = 1\n", "x = 1\n")))
    assert report_from_json(emit_report(report, "json")) == report
