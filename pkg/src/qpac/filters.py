"""Coarse pattern-class selection and fine regex filters over raw source.

The coarse pass decides which detector classes run at all.  The fine
filters pull line-level tables (gate lines, register declarations, measure
lines, Hadamard counts) out of the text for the semantic checks.  False
matches are acceptable here: the semantic checks resolve them later.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from . import pyast
from .pyast import IntConst, fold_constants

if TYPE_CHECKING:  # pragma: no cover
    from .pairio import CodePair
    from .semantics import HadamardLedger


class PatternClass(enum.Enum):
    INITIALIZATION = "initialization"
    OPERATION = "operation"
    MEASUREMENT = "measurement"


class RegisterKind(enum.Enum):
    QUANTUM = "quantum"
    CLASSICAL = "classical"


_COARSE_MEASUREMENT = re.compile(r".+measure.*")
_COARSE_INITIALIZATION = re.compile(r".+(QuantumCircuit|QuantumRegister|ClassicalRegister).*")
_COARSE_OPERATION = re.compile(r".+\..*")

_GATE_LINE = re.compile(r"^\s*(\w+)\.(\w+)\((.*)\)")
_REGISTER_LINE = re.compile(r"^\s*(\w+)\s*=\s*(QuantumRegister|ClassicalRegister)\s*\((.*)\)")
_MEASURE_LINE = re.compile(r".+\.measure.*")
_HADAMARD_LINE = re.compile(r"^\s*(\w+)\.h\((.*)\)")

_REGISTER_KINDS = {
    "QuantumRegister": RegisterKind.QUANTUM,
    "ClassicalRegister": RegisterKind.CLASSICAL,
}


@dataclass(frozen=True)
class GateLineEntry:
    line: int
    receiver: str
    method: str
    raw_args: str


@dataclass(frozen=True)
class GateLineTable:
    entries: tuple[GateLineEntry, ...]


@dataclass(frozen=True)
class RegisterInfo:
    kind: RegisterKind
    size: int
    line: int


@dataclass(frozen=True)
class RegisterTable:
    entries: dict[str, RegisterInfo] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class MeasureLineTable:
    entries: dict[int, str] = field(default_factory=dict)


def coarse_classify(pair: "CodePair") -> frozenset[PatternClass]:
    """Decide which pattern classes merit detector invocation for a pair.

    Works on the raw text of both files; the absence of a class means its
    detectors are never called.
    """
    classes: set[PatternClass] = set()
    for source in (pair.buggy_source, pair.fixed_source):
        for line in source.splitlines():
            if _COARSE_MEASUREMENT.search(line):
                classes.add(PatternClass.MEASUREMENT)
            if _COARSE_INITIALIZATION.search(line):
                classes.add(PatternClass.INITIALIZATION)
            if _COARSE_OPERATION.search(line):
                classes.add(PatternClass.OPERATION)
    return frozenset(classes)


def _code_lines(source: str):
    for lineno, raw in enumerate(source.splitlines(), start=1):
        code = pyast._strip_comment(raw)
        if code.strip():
            yield lineno, code


def filter_gate_lines(source: str) -> GateLineTable:
    """One entry per ``receiver.method(args)`` line, names and raw args captured."""
    entries = []
    for lineno, code in _code_lines(source):
        m = _GATE_LINE.match(code)
        if m:
            entries.append(GateLineEntry(lineno, m.group(1), m.group(2), m.group(3)))
    return GateLineTable(tuple(entries))


def _first_int_argument(raw_args: str) -> int | None:
    try:
        args, _keywords = pyast.parse_arguments(raw_args)
    except ValueError:
        return None
    if not args:
        return None
    first = fold_constants(args[0])
    if isinstance(first, IntConst):
        return first.value
    return None


def filter_registers(source: str) -> RegisterTable:
    """Map each register declaration to its kind and declared size.

    The size is the first positional argument; declarations whose size does
    not fold to a non-negative integer are skipped with a warning.
    """
    entries: dict[str, RegisterInfo] = {}
    warnings: list[str] = []
    for lineno, code in _code_lines(source):
        m = _REGISTER_LINE.match(code)
        if not m:
            continue
        name, ctor, raw_args = m.groups()
        size = _first_int_argument(raw_args)
        if size is None or size < 0:
            warnings.append(f"line {lineno}: register size is not an integer literal")
            continue
        entries[name] = RegisterInfo(_REGISTER_KINDS[ctor], size, lineno)
    return RegisterTable(entries, tuple(warnings))


def filter_measures(source: str) -> MeasureLineTable:
    """Record every line containing a ``.measure`` call, keyed by line number.

    Recognized statements are stored in canonical folded form so two lines
    that only differ in constant spelling compare equal.
    """
    entries: dict[int, str] = {}
    for lineno, code in _code_lines(source):
        if _MEASURE_LINE.search(code):
            entries[lineno] = pyast.canonicalize_line(code)
    return MeasureLineTable(entries)


def count_hadamards(source: str, ledger: "HadamardLedger") -> "HadamardLedger":
    """Increment per-(circuit, qubit) Hadamard counts for each ``.h(...)`` line.

    The ledger arrives pre-populated with the known circuits and their qubit
    slots; applications on unknown circuits or unresolvable qubit indices are
    recorded as warnings, not counted.
    """
    from .semantics import HadamardLedger

    counts = {circuit: dict(slots) for circuit, slots in ledger.counts.items()}
    warnings = list(ledger.warnings)
    for lineno, code in _code_lines(source):
        m = _HADAMARD_LINE.match(code)
        if not m:
            continue
        receiver, raw_args = m.groups()
        if receiver not in counts:
            warnings.append(
                f"line {lineno}: hadamard on unknown circuit {receiver!r}, not counted"
            )
            continue
        qubit = _first_int_argument(raw_args)
        if qubit is None:
            warnings.append(f"line {lineno}: hadamard qubit index is not an integer")
            continue
        if qubit not in counts[receiver]:
            warnings.append(
                f"line {lineno}: hadamard qubit {qubit} outside circuit {receiver!r}"
            )
            continue
        counts[receiver][qubit] += 1
    return HadamardLedger(counts, tuple(warnings))
