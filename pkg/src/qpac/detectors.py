"""The seven bug-fix-pattern detectors and the report orchestrator.

Every detector is a pure function of the shared :class:`DetectionContext`,
so the detectors never interfere with each other and can run in any order;
a pair may exhibit several patterns at once.  Detectors whose coarse class
was not selected return a pruned verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .filters import PatternClass
from .semantics import DetectionContext, FileFacts, GateCall


class PatternId(str, enum.Enum):
    INCORRECT_INITIALIZATION = "incorrect_initialization"
    UNEQUAL_BITS = "unequal_bits"
    INCORRECT_STANDARD_GATE = "incorrect_standard_gate"
    INCORRECT_OPAQUE_GATE = "incorrect_opaque_gate"
    INCORRECT_HADAMARD = "incorrect_hadamard"
    INCORRECT_MEASUREMENT = "incorrect_measurement"
    EXCESSIVE_MEASUREMENT = "excessive_measurement"


PATTERN_ORDER: tuple[PatternId, ...] = tuple(PatternId)

PATTERN_CLASSES: dict[PatternId, PatternClass] = {
    PatternId.INCORRECT_INITIALIZATION: PatternClass.INITIALIZATION,
    PatternId.UNEQUAL_BITS: PatternClass.INITIALIZATION,
    PatternId.INCORRECT_STANDARD_GATE: PatternClass.OPERATION,
    PatternId.INCORRECT_OPAQUE_GATE: PatternClass.OPERATION,
    PatternId.INCORRECT_HADAMARD: PatternClass.OPERATION,
    PatternId.INCORRECT_MEASUREMENT: PatternClass.MEASUREMENT,
    PatternId.EXCESSIVE_MEASUREMENT: PatternClass.MEASUREMENT,
}

PRUNED_NOTE = "pruned by coarse filter"
UNANALYZABLE_NOTE = "pair unanalyzable"


@dataclass(frozen=True)
class Evidence:
    file: str  # "buggy" | "fixed"
    line: int
    note: str


@dataclass(frozen=True)
class PatternVerdict:
    pattern: PatternId
    detected: bool
    evidence: tuple[Evidence, ...] = ()
    note: str = ""


@dataclass(frozen=True)
class DetectionReport:
    pair_id: str
    verdicts: tuple[PatternVerdict, ...]
    classes_considered: frozenset[PatternClass]
    warnings: tuple[str, ...]
    unanalyzable: bool

    def verdict(self, pattern: PatternId) -> PatternVerdict:
        for v in self.verdicts:
            if v.pattern is pattern:
                return v
        raise KeyError(pattern)

    @property
    def detected_patterns(self) -> frozenset[PatternId]:
        return frozenset(v.pattern for v in self.verdicts if v.detected)


def _skip_verdict(ctx: DetectionContext, pattern: PatternId) -> PatternVerdict | None:
    if ctx.unanalyzable:
        return PatternVerdict(pattern, False, (), UNANALYZABLE_NOTE)
    if PATTERN_CLASSES[pattern] not in ctx.classes:
        return PatternVerdict(pattern, False, (), PRUNED_NOTE)
    return None


def _common_circuits(buggy: FileFacts, fixed: FileFacts) -> list[str]:
    return sorted(set(buggy.circuits.entries) & set(fixed.circuits.entries))


def _calls_by_gate(
    calls: tuple[GateCall, ...], gate_table: frozenset[str]
) -> dict[str, list[GateCall]]:
    grouped: dict[str, list[GateCall]] = {}
    for call in calls:
        if call.gate in gate_table:
            grouped.setdefault(call.gate, []).append(call)
    return grouped


def _fmt_args(call: GateCall) -> str:
    return "(" + ", ".join(str(a) for a in call.qubit_args) + ")"


def detect_incorrect_initialization(ctx: DetectionContext) -> PatternVerdict:
    """Report when a gate's qubit indices or a circuit's qubit count change."""
    pattern = PatternId.INCORRECT_INITIALIZATION
    skipped = _skip_verdict(ctx, pattern)
    if skipped is not None:
        return skipped
    evidence: list[Evidence] = []
    for name in _common_circuits(ctx.buggy, ctx.fixed):
        before = ctx.buggy.circuits.entries[name]
        after = ctx.fixed.circuits.entries[name]
        if before.qubits != after.qubits:
            note = f"circuit {name} qubit count {before.qubits} -> {after.qubits}"
            evidence.append(Evidence("buggy", before.line, note))
            evidence.append(Evidence("fixed", after.line, note))
    buggy_groups = _calls_by_gate(ctx.buggy.gate_calls, ctx.gate_table)
    fixed_groups = _calls_by_gate(ctx.fixed.gate_calls, ctx.gate_table)
    for gate in sorted(set(buggy_groups) & set(fixed_groups)):
        for before, after in zip(buggy_groups[gate], fixed_groups[gate]):
            if before.qubit_args != after.qubit_args:
                note = f"{gate} qubit args {_fmt_args(before)} -> {_fmt_args(after)}"
                evidence.append(Evidence("buggy", before.line, note))
                evidence.append(Evidence("fixed", after.line, note))
    return PatternVerdict(pattern, bool(evidence), tuple(evidence))


def detect_unequal_bits(ctx: DetectionContext) -> PatternVerdict:
    """Report circuits whose qubit/clbit mismatch in the buggy file is repaired.

    Register size changes on registers no circuit uses never trigger this.
    """
    pattern = PatternId.UNEQUAL_BITS
    skipped = _skip_verdict(ctx, pattern)
    if skipped is not None:
        return skipped
    evidence: list[Evidence] = []
    for name in _common_circuits(ctx.buggy, ctx.fixed):
        before = ctx.buggy.circuits.entries[name]
        after = ctx.fixed.circuits.entries[name]
        if before.qubits != before.clbits and after.qubits == after.clbits:
            evidence.append(
                Evidence(
                    "buggy",
                    before.line,
                    f"circuit {name} has {before.qubits} qubits but {before.clbits} clbits",
                )
            )
            evidence.append(
                Evidence(
                    "fixed",
                    after.line,
                    f"circuit {name} equalized to {after.qubits} qubits and {after.clbits} clbits",
                )
            )
    return PatternVerdict(pattern, bool(evidence), tuple(evidence))


def detect_incorrect_standard_gate(ctx: DetectionContext) -> PatternVerdict:
    """Report positionally paired calls whose gate names differ but are both inbuilt.

    Pairing is positional over the whole call sequences, so renaming the
    circuit identifier does not mask the change.
    """
    pattern = PatternId.INCORRECT_STANDARD_GATE
    skipped = _skip_verdict(ctx, pattern)
    if skipped is not None:
        return skipped
    evidence: list[Evidence] = []
    for position, (before, after) in enumerate(
        zip(ctx.buggy.gate_calls, ctx.fixed.gate_calls)
    ):
        if before.gate == after.gate:
            continue
        if before.gate in ctx.gate_table and after.gate in ctx.gate_table:
            note = f"call {position + 1}: gate {before.gate} -> {after.gate}"
            evidence.append(Evidence("buggy", before.line, note))
            evidence.append(Evidence("fixed", after.line, note))
    return PatternVerdict(pattern, bool(evidence), tuple(evidence))


def detect_incorrect_opaque_gate(ctx: DetectionContext) -> PatternVerdict:
    """Report a drop in wide opaque gates matched (or exceeded) by new composites.

    Counts are compared in aggregate; gate names need not persist through
    the fix.
    """
    pattern = PatternId.INCORRECT_OPAQUE_GATE
    skipped = _skip_verdict(ctx, pattern)
    if skipped is not None:
        return skipped
    opaque_drop = ctx.buggy.opaque_count - ctx.fixed.opaque_count
    composite_gain = ctx.fixed.composite_count - ctx.buggy.composite_count
    if opaque_drop > 0 and composite_gain >= opaque_drop:
        note = (
            f"opaque gates {ctx.buggy.opaque_count} -> {ctx.fixed.opaque_count}, "
            f"composite wraps {ctx.buggy.composite_count} -> {ctx.fixed.composite_count}"
        )
        evidence = [Evidence("buggy", g.line, note) for g in ctx.buggy.opaque_gates]
        evidence.extend(Evidence("fixed", line, note) for line in ctx.fixed.composite_wraps)
        return PatternVerdict(pattern, True, tuple(evidence))
    return PatternVerdict(pattern, False)


def _first_hadamard_line(facts: FileFacts, circuit: str, qubit: int) -> int:
    for call in facts.gate_calls:
        if call.circuit == circuit and call.gate == "h" and call.qubit_args == (qubit,):
            return call.line
    return facts.circuits.entries[circuit].line


def detect_incorrect_hadamard(ctx: DetectionContext) -> PatternVerdict:
    """Report qubits whose Hadamard count goes from odd to even (and nonzero).

    An odd count that simply drops to zero is a gate change, not a parity
    repair, and is left to the other detectors.
    """
    pattern = PatternId.INCORRECT_HADAMARD
    skipped = _skip_verdict(ctx, pattern)
    if skipped is not None:
        return skipped
    evidence: list[Evidence] = []
    common = sorted(set(ctx.buggy.hadamards.counts) & set(ctx.fixed.hadamards.counts))
    for circuit in common:
        before_slots = ctx.buggy.hadamards.counts[circuit]
        after_slots = ctx.fixed.hadamards.counts[circuit]
        for qubit in sorted(before_slots):
            before = before_slots[qubit]
            after = after_slots.get(qubit, 0)
            if before % 2 == 1 and after % 2 == 0 and after > 0:
                note = f"hadamards on {circuit} qubit {qubit}: {before} -> {after}"
                evidence.append(
                    Evidence("buggy", _first_hadamard_line(ctx.buggy, circuit, qubit), note)
                )
                evidence.append(
                    Evidence("fixed", _first_hadamard_line(ctx.fixed, circuit, qubit), note)
                )
    return PatternVerdict(pattern, bool(evidence), tuple(evidence))


def detect_incorrect_measurement(ctx: DetectionContext) -> PatternVerdict:
    """Four-stage cascade over positionally corresponding measure calls.

    Fires when the totals differ, the variant order differs, corresponding
    arguments differ, or identical calls sit at different line numbers.
    """
    pattern = PatternId.INCORRECT_MEASUREMENT
    skipped = _skip_verdict(ctx, pattern)
    if skipped is not None:
        return skipped
    before_calls = ctx.buggy.measure_calls
    after_calls = ctx.fixed.measure_calls

    if len(before_calls) != len(after_calls):
        note = f"measure call totals {len(before_calls)} -> {len(after_calls)}"
        evidence = []
        if before_calls:
            evidence.append(Evidence("buggy", before_calls[0].line, note))
        if after_calls:
            evidence.append(Evidence("fixed", after_calls[0].line, note))
        return PatternVerdict(pattern, True, tuple(evidence))

    for position, (before, after) in enumerate(zip(before_calls, after_calls)):
        if before.variant != after.variant:
            note = f"call {position + 1}: variant {before.variant} -> {after.variant}"
            return PatternVerdict(
                pattern,
                True,
                (
                    Evidence("buggy", before.line, note),
                    Evidence("fixed", after.line, note),
                ),
            )

    for position, (before, after) in enumerate(zip(before_calls, after_calls)):
        if before.args != after.args:
            note = (
                f"call {position + 1}: arguments ({', '.join(before.args)}) -> "
                f"({', '.join(after.args)})"
            )
            return PatternVerdict(
                pattern,
                True,
                (
                    Evidence("buggy", before.line, note),
                    Evidence("fixed", after.line, note),
                ),
            )

    for position, (before, after) in enumerate(zip(before_calls, after_calls)):
        if before.line != after.line:
            note = f"call {position + 1}: moved from line {before.line} to {after.line}"
            return PatternVerdict(
                pattern,
                True,
                (
                    Evidence("buggy", before.line, note),
                    Evidence("fixed", after.line, note),
                ),
            )

    return PatternVerdict(pattern, False)


def measurement_totals(facts: FileFacts) -> dict[str, int]:
    """Loop-weighted measurement count per circuit known to the file."""
    totals = {name: 0 for name in facts.circuits.entries}
    for call in facts.measure_calls:
        if call.circuit in totals:
            totals[call.circuit] += call.multiplier
    return totals


def detect_excessive_measurement(ctx: DetectionContext) -> PatternVerdict:
    """Report circuits whose loop-weighted measurement count strictly decreases."""
    pattern = PatternId.EXCESSIVE_MEASUREMENT
    skipped = _skip_verdict(ctx, pattern)
    if skipped is not None:
        return skipped
    before_totals = measurement_totals(ctx.buggy)
    after_totals = measurement_totals(ctx.fixed)
    evidence: list[Evidence] = []
    for name in sorted(set(before_totals) & set(after_totals)):
        if after_totals[name] < before_totals[name]:
            note = f"measurements on {name}: {before_totals[name]} -> {after_totals[name]}"

            def first_line(facts: FileFacts) -> int:
                for call in facts.measure_calls:
                    if call.circuit == name:
                        return call.line
                return facts.circuits.entries[name].line

            evidence.append(Evidence("buggy", first_line(ctx.buggy), note))
            evidence.append(Evidence("fixed", first_line(ctx.fixed), note))
    return PatternVerdict(pattern, bool(evidence), tuple(evidence))


DETECTORS = {
    PatternId.INCORRECT_INITIALIZATION: detect_incorrect_initialization,
    PatternId.UNEQUAL_BITS: detect_unequal_bits,
    PatternId.INCORRECT_STANDARD_GATE: detect_incorrect_standard_gate,
    PatternId.INCORRECT_OPAQUE_GATE: detect_incorrect_opaque_gate,
    PatternId.INCORRECT_HADAMARD: detect_incorrect_hadamard,
    PatternId.INCORRECT_MEASUREMENT: detect_incorrect_measurement,
    PatternId.EXCESSIVE_MEASUREMENT: detect_excessive_measurement,
}


def detect_all(ctx: DetectionContext) -> DetectionReport:
    """Run every detector and assemble the report for all seven patterns.

    Verdicts are independent of execution order; a detector's verdict here
    always equals running it alone on the same context.
    """
    verdicts = tuple(DETECTORS[pattern](ctx) for pattern in PATTERN_ORDER)
    return DetectionReport(
        pair_id=ctx.pair_id,
        verdicts=verdicts,
        classes_considered=ctx.classes,
        warnings=ctx.warnings,
        unanalyzable=ctx.unanalyzable,
    )
