"""Command-line frontend: single-pair detection, corpus runs, feature export.

Exit codes: 0 analyzed / corpus fully matching, 1 corpus mismatch, 2 I/O or
parse failure, 64 usage error.  JSON output is deterministic: fixed key
order, no timestamps.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .detectors import (
    DetectionReport,
    Evidence,
    PATTERN_ORDER,
    PatternId,
    PatternVerdict,
    detect_all,
    measurement_totals,
)
from .filters import PatternClass
from .pairio import CorpusCase, IoError, load_pair, scan_corpus
from .semantics import (
    STANDARD_GATES,
    DetectionContext,
    build_context,
    load_gate_table,
)

GATE_TABLE_ENV = "QPAC_GATE_TABLE"

FEATURE_KEYS = (
    "gate_call_count_delta",
    "measure_count_delta",
    "hadamard_parity_flips",
    "opaque_delta",
    "composite_delta",
    "circuit_count",
    "register_count",
)

_CLASS_ORDER = (
    PatternClass.INITIALIZATION,
    PatternClass.OPERATION,
    PatternClass.MEASUREMENT,
)


# ---------------------------------------------------------------------------
# Report rendering


def _verdict_json(verdict: PatternVerdict) -> dict:
    return {
        "id": verdict.pattern.value,
        "detected": verdict.detected,
        "evidence": [
            {"file": e.file, "line": e.line, "note": e.note} for e in verdict.evidence
        ],
        "note": verdict.note,
    }


def emit_report(
    report: DetectionReport,
    format: str = "json",
    patterns: tuple[PatternId, ...] | None = None,
) -> str:
    """Render a report as JSON (fixed key order) or a human-readable table.

    ``patterns`` restricts which verdicts are shown without altering them.
    """
    shown = report.verdicts
    if patterns is not None:
        wanted = set(patterns)
        shown = tuple(v for v in report.verdicts if v.pattern in wanted)
    if format == "json":
        payload = {
            "pair_id": report.pair_id,
            "unanalyzable": report.unanalyzable,
            "classes_considered": [
                c.value for c in _CLASS_ORDER if c in report.classes_considered
            ],
            "patterns": [_verdict_json(v) for v in shown],
            "warnings": list(report.warnings),
        }
        return json.dumps(payload, indent=2)
    lines = [f"pair: {report.pair_id}"]
    lines.append(f"unanalyzable: {'yes' if report.unanalyzable else 'no'}")
    classes = ", ".join(c.value for c in _CLASS_ORDER if c in report.classes_considered)
    lines.append(f"classes: {classes or '(none)'}")
    for verdict in shown:
        flag = "DETECTED" if verdict.detected else "no"
        suffix = f"  [{verdict.note}]" if verdict.note else ""
        lines.append(f"  {verdict.pattern.value:<26} {flag}{suffix}")
        for e in verdict.evidence:
            lines.append(f"      {e.file}:{e.line}  {e.note}")
    if report.warnings:
        lines.append(f"warnings ({len(report.warnings)}):")
        lines.extend(f"  {w}" for w in report.warnings)
    return "\n".join(lines)


def report_from_json(text: str) -> DetectionReport:
    """Inverse of ``emit_report(..., format="json")`` for full reports."""
    payload = json.loads(text)
    verdicts = tuple(
        PatternVerdict(
            pattern=PatternId(v["id"]),
            detected=v["detected"],
            evidence=tuple(
                Evidence(e["file"], e["line"], e["note"]) for e in v["evidence"]
            ),
            note=v.get("note", ""),
        )
        for v in payload["patterns"]
    )
    classes = frozenset(PatternClass(c) for c in payload["classes_considered"])
    return DetectionReport(
        pair_id=payload["pair_id"],
        verdicts=verdicts,
        classes_considered=classes,
        warnings=tuple(payload["warnings"]),
        unanalyzable=payload["unanalyzable"],
    )


# ---------------------------------------------------------------------------
# Feature records


def _hadamard_parity_flips(ctx: DetectionContext) -> int:
    flips = 0
    common = set(ctx.buggy.hadamards.counts) & set(ctx.fixed.hadamards.counts)
    for circuit in common:
        before_slots = ctx.buggy.hadamards.counts[circuit]
        after_slots = ctx.fixed.hadamards.counts[circuit]
        for qubit, before in before_slots.items():
            after = after_slots.get(qubit, 0)
            if before % 2 == 1 and after % 2 == 0 and after > 0:
                flips += 1
    return flips


def pair_features(ctx: DetectionContext) -> dict[str, int]:
    """The fixed numeric feature summary of one pair (same keys every time)."""
    if ctx.unanalyzable:
        return {key: 0 for key in FEATURE_KEYS}
    before, after = ctx.buggy, ctx.fixed
    return {
        "gate_call_count_delta": len(after.gate_calls) - len(before.gate_calls),
        "measure_count_delta": sum(measurement_totals(after).values())
        - sum(measurement_totals(before).values()),
        "hadamard_parity_flips": _hadamard_parity_flips(ctx),
        "opaque_delta": before.opaque_count - after.opaque_count,
        "composite_delta": after.composite_count - before.composite_count,
        "circuit_count": len(
            set(before.circuits.entries) | set(after.circuits.entries)
        ),
        "register_count": len(
            set(before.registers.entries) | set(after.registers.entries)
        ),
    }


def feature_records(ctx: DetectionContext, report: DetectionReport) -> list[dict]:
    """Seven records per pair: one per pattern, sharing the pair's features."""
    features = pair_features(ctx)
    return [
        {
            "pair_id": report.pair_id,
            "pattern": verdict.pattern.value,
            "detected": verdict.detected,
            "features": features,
        }
        for verdict in report.verdicts
    ]


# ---------------------------------------------------------------------------
# Corpus scoring


@dataclass(frozen=True)
class PatternCounts:
    true_pos: int = 0
    false_pos: int = 0
    true_neg: int = 0
    false_neg: int = 0


@dataclass(frozen=True)
class CaseDiff:
    case: str
    expected: tuple[str, ...]
    detected: tuple[str, ...]


@dataclass(frozen=True)
class CorpusScore:
    cases: int
    mismatches: int
    per_pattern: dict[PatternId, PatternCounts]
    diffs: tuple[CaseDiff, ...]
    errors: tuple[tuple[str, str], ...]


def score_corpus(
    cases: tuple[CorpusCase, ...], gate_table: frozenset[str]
) -> tuple[CorpusScore, list[tuple[CorpusCase, DetectionReport]]]:
    counts = {p: [0, 0, 0, 0] for p in PATTERN_ORDER}  # tp, fp, tn, fn
    diffs: list[CaseDiff] = []
    errors: list[tuple[str, str]] = []
    reports: list[tuple[CorpusCase, DetectionReport]] = []
    scored = 0
    for case in cases:
        if case.error is not None or case.pair is None:
            errors.append((case.name, case.error or "unreadable pair"))
            continue
        report = detect_all(build_context(case.pair, gate_table))
        reports.append((case, report))
        scored += 1
        detected = report.detected_patterns
        for pattern in PATTERN_ORDER:
            hit = pattern in detected
            labeled = pattern in case.expected_patterns
            if hit and labeled:
                counts[pattern][0] += 1
            elif hit and not labeled:
                counts[pattern][1] += 1
            elif not hit and not labeled:
                counts[pattern][2] += 1
            else:
                counts[pattern][3] += 1
        if detected != case.expected_patterns:
            diffs.append(
                CaseDiff(
                    case=case.name,
                    expected=tuple(sorted(p.value for p in case.expected_patterns)),
                    detected=tuple(sorted(p.value for p in detected)),
                )
            )
    score = CorpusScore(
        cases=scored,
        mismatches=len(diffs),
        per_pattern={p: PatternCounts(*counts[p]) for p in PATTERN_ORDER},
        diffs=tuple(diffs),
        errors=tuple(errors),
    )
    return score, reports


def render_score(score: CorpusScore, format: str) -> str:
    if format == "json":
        payload = {
            "cases": score.cases,
            "mismatches": score.mismatches,
            "per_pattern": {
                p.value: {
                    "true_pos": c.true_pos,
                    "false_pos": c.false_pos,
                    "true_neg": c.true_neg,
                    "false_neg": c.false_neg,
                }
                for p, c in score.per_pattern.items()
            },
            "case_diffs": [
                {"case": d.case, "expected": list(d.expected), "detected": list(d.detected)}
                for d in score.diffs
            ],
            "errors": [{"case": name, "error": msg} for name, msg in score.errors],
        }
        return json.dumps(payload, indent=2)
    lines = [f"cases: {score.cases}   mismatches: {score.mismatches}"]
    lines.append(f"{'pattern':<26} {'tp':>3} {'fp':>3} {'tn':>3} {'fn':>3}")
    for pattern, c in score.per_pattern.items():
        lines.append(
            f"{pattern.value:<26} {c.true_pos:>3} {c.false_pos:>3} {c.true_neg:>3} {c.false_neg:>3}"
        )
    for diff in score.diffs:
        lines.append(
            f"MISMATCH {diff.case}: expected [{', '.join(diff.expected)}]"
            f" detected [{', '.join(diff.detected)}]"
        )
    for name, msg in score.errors:
        lines.append(f"ERROR {name}: {msg}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Commands


def _gate_table() -> frozenset[str]:
    override = os.environ.get(GATE_TABLE_ENV)
    if override:
        return load_gate_table(override)
    return STANDARD_GATES


def _parse_pattern_option(raw: str | None) -> tuple[PatternId, ...] | None:
    if raw is None:
        return None
    known = {p.value: p for p in PatternId}
    chosen: list[PatternId] = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if item not in known:
            click.echo(f"error: unknown pattern id {item!r}", err=True)
            sys.exit(64)
        chosen.append(known[item])
    return tuple(chosen)


@click.group()
def main() -> None:
    """Classify bug-fix patterns in pairs of Qiskit-style source files."""


@main.command()
@click.option("--buggy", "buggy_path", required=True, type=click.Path(), help="Buggy source file.")
@click.option("--fixed", "fixed_path", required=True, type=click.Path(), help="Fixed source file.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
@click.option("--patterns", default=None, help="Comma-separated pattern ids to show.")
def detect(buggy_path: str, fixed_path: str, fmt: str, patterns: str | None) -> None:
    """Detect bug-fix patterns for one buggy/fixed pair."""
    wanted = _parse_pattern_option(patterns)
    try:
        pair = load_pair(buggy_path, fixed_path)
        gate_table = _gate_table()
    except (IoError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    report = detect_all(build_context(pair, gate_table))
    click.echo(emit_report(report, fmt, wanted))
    if report.unanalyzable:
        click.echo("error: pair could not be parsed", err=True)
        sys.exit(2)
    sys.exit(0)


@main.command()
@click.argument("root", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
def corpus(root: str, fmt: str) -> None:
    """Run all detectors over a labeled corpus and score the verdicts."""
    try:
        cases = scan_corpus(root)
        gate_table = _gate_table()
    except (IoError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    score, _reports = score_corpus(cases, gate_table)
    click.echo(render_score(score, fmt))
    sys.exit(0 if score.mismatches == 0 and not score.errors else 1)


@main.command()
@click.argument("root", type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path(), help="NDJSON output file.")
def features(root: str, out_path: str) -> None:
    """Export newline-delimited JSON feature records, seven per corpus case."""
    try:
        cases = scan_corpus(root)
        gate_table = _gate_table()
    except (IoError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    lines: list[str] = []
    for case in cases:
        if case.error is not None or case.pair is None:
            click.echo(f"skipping {case.name}: {case.error}", err=True)
            continue
        ctx = build_context(case.pair, gate_table)
        report = detect_all(ctx)
        for record in feature_records(ctx, report):
            lines.append(json.dumps(record))
    try:
        Path(out_path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: cannot write {out_path}: {exc.strerror or exc}", err=True)
        sys.exit(2)
    click.echo(f"wrote {len(lines)} records to {out_path}")
    sys.exit(0)


if __name__ == "__main__":  # pragma: no cover
    main()
