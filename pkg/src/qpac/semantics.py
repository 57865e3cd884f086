"""Semantic checks: build the shared, immutable per-pair detection context.

Both files are parsed exactly once.  Circuit and register sizes are
resolved, gate and measure calls are extracted with constants folded, and
loop bodies contribute a multiplier so measurement counts reflect iteration
counts.  The resulting :class:`DetectionContext` is the single input every
detector consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Iterator

from . import pyast
from .filters import (
    PatternClass,
    RegisterKind,
    RegisterTable,
    MeasureLineTable,
    coarse_classify,
    count_hadamards,
    filter_measures,
    filter_registers,
)
from .pyast import (
    Assign,
    Attribute,
    Call,
    ExprStmt,
    For,
    IntConst,
    ListLit,
    ModuleAst,
    Name,
    ParseError,
    Stmt,
    StrConst,
    fold_constants,
    fold_module,
)

if TYPE_CHECKING:  # pragma: no cover
    from .pairio import CodePair

# Gate identifiers accepted as inbuilt.  Loadable from a newline-delimited
# file so the table can grow without code changes.
STANDARD_GATES: frozenset[str] = frozenset(
    {
        "h", "x", "y", "z", "s", "sdg", "t", "tdg",
        "cx", "cy", "cz", "ccx", "swap", "cswap",
        "rx", "ry", "rz", "p", "u", "ch",
        "crx", "cry", "crz", "cp", "id",
        "sx", "sxdg", "u1", "u2", "u3",
        "cu", "rxx", "ryy", "rzz", "iswap",
    }
)

MEASURE_VARIANTS = ("measure", "measure_all", "measure_inactive")


def load_gate_table(path: str | Path) -> frozenset[str]:
    """Load a standard-gate table from a newline-delimited text file."""
    names = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        name = raw.strip()
        if name and not name.startswith("#"):
            names.add(name)
    return frozenset(names)


@dataclass(frozen=True)
class CircuitInfo:
    qubits: int
    clbits: int
    line: int


@dataclass(frozen=True)
class CircuitTable:
    entries: dict[str, CircuitInfo] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class GateCall:
    circuit: str
    gate: str
    qubit_args: tuple[int | str, ...]
    line: int


@dataclass(frozen=True)
class MeasureCall:
    circuit: str
    variant: str
    args: tuple[str, ...]
    line: int
    multiplier: int = 1


@dataclass(frozen=True)
class HadamardLedger:
    counts: dict[str, dict[int, int]] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class OpaqueGate:
    name: str
    line: int


@dataclass(frozen=True)
class FileFacts:
    """Everything the detectors need to know about one file."""

    ast: ModuleAst
    circuits: CircuitTable
    registers: RegisterTable
    gate_calls: tuple[GateCall, ...]
    measure_calls: tuple[MeasureCall, ...]
    measure_lines: MeasureLineTable
    hadamards: HadamardLedger
    opaque_gates: tuple[OpaqueGate, ...]
    composite_wraps: tuple[int, ...]  # line numbers of to_instruction() assigns

    @property
    def opaque_count(self) -> int:
        return len(self.opaque_gates)

    @property
    def composite_count(self) -> int:
        return len(self.composite_wraps)


@dataclass(frozen=True)
class DetectionContext:
    """Immutable bundle built once per code pair and shared by all detectors."""

    pair_id: str
    classes: frozenset[PatternClass]
    buggy: FileFacts | None
    fixed: FileFacts | None
    warnings: tuple[str, ...]
    gate_table: frozenset[str] = STANDARD_GATES

    @property
    def unanalyzable(self) -> bool:
        return self.buggy is None or self.fixed is None


def _walk_statements(body: tuple[Stmt, ...]) -> Iterator[Stmt]:
    for stmt in body:
        yield stmt
        if isinstance(stmt, For):
            yield from _walk_statements(stmt.body)


def _statement_value(stmt: Stmt):
    if isinstance(stmt, ExprStmt):
        return stmt.value
    if isinstance(stmt, Assign):
        return stmt.value
    return None


def _arg_key(expr) -> int | str:
    folded = fold_constants(expr)
    if isinstance(folded, IntConst):
        return folded.value
    return pyast.expr_source(folded)


def _arg_text(expr) -> str:
    return pyast.expr_source(fold_constants(expr))


def extract_circuits(ast: ModuleAst, regs: RegisterTable) -> CircuitTable:
    """Resolve qubit/clbit counts for every QuantumCircuit assignment.

    Integer literals are taken directly (one literal means no classical
    bits); register names are resolved through the register table, summing
    sizes per kind.  Circuits with unresolvable arguments are skipped with a
    warning.
    """
    entries: dict[str, CircuitInfo] = {}
    warnings: list[str] = []
    for stmt in _walk_statements(ast.body):
        if not isinstance(stmt, Assign):
            continue
        value = stmt.value
        if not (isinstance(value, Call) and isinstance(value.func, Name)):
            continue
        if value.func.id != "QuantumCircuit":
            continue
        ints: list[int] = []
        reg_qubits = 0
        reg_clbits = 0
        used_registers = False
        resolvable = True
        for arg in value.args:
            folded = fold_constants(arg)
            if isinstance(folded, IntConst):
                ints.append(folded.value)
            elif isinstance(folded, Name):
                info = regs.entries.get(folded.id)
                if info is None:
                    warnings.append(
                        f"line {stmt.line}: circuit argument {folded.id!r} is not a known register"
                    )
                    resolvable = False
                    break
                used_registers = True
                if info.kind is RegisterKind.QUANTUM:
                    reg_qubits += info.size
                else:
                    reg_clbits += info.size
            else:
                warnings.append(f"line {stmt.line}: unresolvable circuit size argument")
                resolvable = False
                break
        if not resolvable:
            continue
        if used_registers and ints:
            warnings.append(
                f"line {stmt.line}: circuit mixes registers and integer sizes, skipped"
            )
            continue
        if used_registers:
            qubits, clbits = reg_qubits, reg_clbits
        else:
            qubits = ints[0] if ints else 0
            clbits = ints[1] if len(ints) > 1 else 0
        for target in stmt.targets:
            entries[target.id] = CircuitInfo(qubits, clbits, stmt.line)
    return CircuitTable(entries, tuple(warnings))


def extract_gate_calls(
    ast: ModuleAst, gates: frozenset[str], circuits: CircuitTable
) -> tuple[GateCall, ...]:
    """Ordered method calls on known circuits, with qubit arguments folded.

    Membership in the standard-gate table is decided by the detectors, not
    here; non-circuit receivers are excluded.
    """
    del gates  # membership checks happen in the detectors
    calls: list[GateCall] = []
    for stmt in _walk_statements(ast.body):
        value = _statement_value(stmt)
        if not isinstance(value, Call):
            continue
        func = value.func
        if not (isinstance(func, Attribute) and isinstance(func.base, Name)):
            continue
        if func.base.id not in circuits.entries:
            continue
        qubit_args = tuple(_arg_key(a) for a in value.args)
        calls.append(GateCall(func.base.id, func.attr, qubit_args, stmt.line))
    return tuple(calls)


def _opaque_entries(ast: ModuleAst) -> tuple[tuple[OpaqueGate, ...], tuple[str, ...]]:
    entries: list[OpaqueGate] = []
    warnings: list[str] = []
    for stmt in _walk_statements(ast.body):
        if not isinstance(stmt, Assign):
            continue
        value = stmt.value
        if not (isinstance(value, Call) and isinstance(value.func, Name)):
            continue
        if value.func.id != "Gate" or len(value.args) < 2:
            continue
        if not isinstance(value.args[0], StrConst):
            continue
        width = fold_constants(value.args[1])
        if not isinstance(width, IntConst):
            warnings.append(
                f"line {stmt.line}: opaque gate qubit count is not a constant, ignored"
            )
            continue
        if width.value >= 3:
            for target in stmt.targets:
                entries.append(OpaqueGate(target.id, stmt.line))
    return tuple(entries), tuple(warnings)


def extract_opaque_gates(ast: ModuleAst) -> tuple[int, frozenset[str]]:
    """Count opaque gate instantiations controlling three or more qubits."""
    entries, _warnings = _opaque_entries(ast)
    return len(entries), frozenset(e.name for e in entries)


def _composite_entries(ast: ModuleAst) -> tuple[int, ...]:
    lines: list[int] = []
    for stmt in _walk_statements(ast.body):
        if not isinstance(stmt, Assign):
            continue
        value = stmt.value
        if not (isinstance(value, Call) and isinstance(value.func, Attribute)):
            continue
        if value.func.attr == "to_instruction" and not value.args:
            lines.append(stmt.line)
    return tuple(lines)


def extract_composite_wraps(ast: ModuleAst) -> int:
    """Count assignments produced by a ``to_instruction()`` method call."""
    return len(_composite_entries(ast))


def _loop_multiplier(loop: For) -> tuple[int, str | None]:
    iterable = fold_constants(loop.iterable)
    if isinstance(iterable, ListLit):
        return len(iterable.elements), None
    if isinstance(iterable, Call) and isinstance(iterable.func, Name):
        if iterable.func.id == "range":
            bounds: list[int] = []
            for arg in iterable.args:
                if not isinstance(arg, IntConst):
                    return 1, f"line {loop.line}: non-constant loop bound, multiplier 1"
                bounds.append(arg.value)
            if len(bounds) == 1:
                return max(bounds[0], 0), None
            if len(bounds) == 2:
                return max(bounds[1] - bounds[0], 0), None
            if len(bounds) == 3:
                start, stop, step = bounds
                if step <= 0:
                    return 1, f"line {loop.line}: non-positive loop step, multiplier 1"
                span = max(stop - start, 0)
                return (span + step - 1) // step, None
    return 1, f"line {loop.line}: unsupported loop iterable, multiplier 1"


def expand_loop_multiplier(loop: For) -> int:
    """Number of iterations a ``for`` loop over range(...) or a list runs for."""
    count, _warning = _loop_multiplier(loop)
    return count


def _measure_entries(
    body: tuple[Stmt, ...], multiplier: int
) -> tuple[list[MeasureCall], list[str]]:
    calls: list[MeasureCall] = []
    warnings: list[str] = []
    for stmt in body:
        if isinstance(stmt, For):
            inner, note = _loop_multiplier(stmt)
            if note is not None:
                warnings.append(note)
            nested, nested_warnings = _measure_entries(stmt.body, multiplier * inner)
            calls.extend(nested)
            warnings.extend(nested_warnings)
            continue
        value = _statement_value(stmt)
        if not isinstance(value, Call):
            continue
        func = value.func
        if not (isinstance(func, Attribute) and isinstance(func.base, Name)):
            continue
        if not func.attr.startswith("measure"):
            continue
        if func.attr not in MEASURE_VARIANTS:
            warnings.append(
                f"line {stmt.line}: unknown measure variant {func.attr!r}, excluded"
            )
            continue
        args = tuple(_arg_text(a) for a in value.args)
        calls.append(MeasureCall(func.base.id, func.attr, args, stmt.line, multiplier))
    return calls, warnings


def extract_measure_calls(ast: ModuleAst) -> tuple[MeasureCall, ...]:
    """Ordered measure/measure_all/measure_inactive calls with folded arguments.

    A call inside a loop contributes one logical entry annotated with the
    loop's iteration multiplier.
    """
    calls, _warnings = _measure_entries(ast.body, 1)
    return tuple(calls)


def _empty_ledger(circuits: CircuitTable) -> HadamardLedger:
    return HadamardLedger(
        {name: {q: 0 for q in range(info.qubits)} for name, info in circuits.entries.items()}
    )


def _file_facts(source: str, gate_table: frozenset[str]) -> tuple[FileFacts, list[str]]:
    ast = fold_module(pyast.parse(source))
    warnings = list(ast.warnings)
    registers = filter_registers(source)
    warnings.extend(registers.warnings)
    circuits = extract_circuits(ast, registers)
    warnings.extend(circuits.warnings)
    gate_calls = extract_gate_calls(ast, gate_table, circuits)
    measure_calls, measure_warnings = _measure_entries(ast.body, 1)
    warnings.extend(measure_warnings)
    measure_lines = filter_measures(source)
    hadamards = count_hadamards(source, _empty_ledger(circuits))
    warnings.extend(hadamards.warnings)
    opaque_gates, opaque_warnings = _opaque_entries(ast)
    warnings.extend(opaque_warnings)
    composite_wraps = _composite_entries(ast)
    facts = FileFacts(
        ast=ast,
        circuits=circuits,
        registers=registers,
        gate_calls=gate_calls,
        measure_calls=tuple(measure_calls),
        measure_lines=measure_lines,
        hadamards=hadamards,
        opaque_gates=opaque_gates,
        composite_wraps=composite_wraps,
    )
    return facts, warnings


def build_context(pair: CodePair, gate_table: frozenset[str] = STANDARD_GATES) -> DetectionContext:
    """Parse both files once and run every extraction for a code pair.

    A :class:`~qpac.pyast.ParseError` in either file marks the pair
    unanalyzable instead of propagating through the detectors.
    """
    classes = coarse_classify(pair)
    warnings: list[str] = []
    sides: dict[str, FileFacts | None] = {"buggy": None, "fixed": None}
    for label, source in (("buggy", pair.buggy_source), ("fixed", pair.fixed_source)):
        try:
            facts, file_warnings = _file_facts(source, gate_table)
        except ParseError as exc:
            warnings.append(f"{label}: {exc}")
            return DetectionContext(
                pair_id=pair.pair_id,
                classes=classes,
                buggy=None,
                fixed=None,
                warnings=tuple(warnings),
                gate_table=gate_table,
            )
        sides[label] = facts
        warnings.extend(f"{label}: {w}" for w in file_warnings)
    return DetectionContext(
        pair_id=pair.pair_id,
        classes=classes,
        buggy=sides["buggy"],
        fixed=sides["fixed"],
        warnings=tuple(warnings),
        gate_table=gate_table,
    )


def with_classes(ctx: DetectionContext, classes: frozenset[PatternClass]) -> DetectionContext:
    """Copy of a context with the coarse classes replaced (used for audits)."""
    return replace(ctx, classes=classes)
