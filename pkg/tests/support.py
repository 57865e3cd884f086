"""Shared test helpers: corpus paths, program generators, independent oracles."""

from __future__ import annotations

import random
import re
from pathlib import Path

from qpac.pairio import CodePair

REPO_ROOT = Path(__file__).resolve().parent.parent
GOLDEN_ROOT = REPO_ROOT / "corpus" / "golden"
NEGATIVE_ROOT = REPO_ROOT / "corpus" / "negative"

GOLDEN_EXPECTED = {
    "gate_index_change": {"incorrect_initialization"},
    "register_size_mismatch": {"unequal_bits"},
    "gate_substitution": {"incorrect_standard_gate"},
    "gate_substitution_renamed": {"incorrect_standard_gate"},
    "opaque_to_composite": {"incorrect_opaque_gate"},
    "hadamard_parity_repair": {"incorrect_hadamard"},
    "measure_variant_change": {"incorrect_measurement"},
    "measure_arg_reorder": {"incorrect_measurement"},
    "measure_loop_reduction": {"excessive_measurement"},
    "folded_index_noop": set(),
    "gate_order_swap": {"incorrect_standard_gate"},
}


def pair_from_sources(buggy: str, fixed: str, pair_id: str = "case") -> CodePair:
    return CodePair(pair_id=pair_id, buggy_source=buggy, fixed_source=fixed)


def rewrite_int_literals(source: str) -> str:
    """Rewrite every integer literal k as (k-1)+1, skipping strings and comments."""

    def rewrite_line(line: str) -> str:
        out: list[str] = []
        i = 0
        quote: str | None = None
        while i < len(line):
            c = line[i]
            if quote is not None:
                out.append(c)
                if c == "\\" and i + 1 < len(line):
                    out.append(line[i + 1])
                    i += 2
                    continue
                if c == quote:
                    quote = None
                i += 1
                continue
            if c in "'\"":
                quote = c
                out.append(c)
                i += 1
                continue
            if c == "#":
                out.append(line[i:])
                break
            if c.isdigit():
                j = i
                while j < len(line) and line[j].isdigit():
                    j += 1
                prev = line[i - 1] if i > 0 else ""
                literal = line[i:j]
                if prev.isalnum() or prev == "_":
                    out.append(literal)  # digits inside an identifier
                else:
                    out.append(f"({literal}-1)+1")
                i = j
                continue
            out.append(c)
            i += 1
        return "".join(out)

    return "\n".join(rewrite_line(line) for line in source.splitlines())


# ---------------------------------------------------------------------------
# Random subset-program generation

_GATES_1Q = ("h", "x", "y", "z", "s", "t", "sdg", "tdg")
_GATES_2Q = ("cx", "cz", "swap")
_VARIANTS = ("measure", "measure_all", "measure_inactive")


def generate_program(rng: random.Random) -> str:
    """A random program in the analyzed subset, simple enough for text oracles.

    Circuit declarations use plain integer literals; loops are flat with a
    single measure statement in the body and bounds at most 20.
    """
    lines: list[str] = []
    names = ["qc", "circ"][: rng.randint(1, 2)]
    sizes: dict[str, int] = {}
    for name in names:
        qubits = rng.randint(1, 4)
        if rng.random() < 0.6:
            lines.append(f"{name} = QuantumCircuit({qubits}, {rng.randint(0, 4)})")
        else:
            lines.append(f"{name} = QuantumCircuit({qubits})")
        sizes[name] = qubits
    for _ in range(rng.randint(0, 8)):
        name = rng.choice(names)
        qubits = sizes[name]
        roll = rng.random()
        if roll < 0.45:
            gate = rng.choice(_GATES_1Q)
            lines.append(f"{name}.{gate}({rng.randrange(qubits)})")
        elif roll < 0.55 and qubits >= 2:
            gate = rng.choice(_GATES_2Q)
            lines.append(f"{name}.{gate}({rng.randrange(qubits)}, {rng.randrange(qubits)})")
        elif roll < 0.75:
            shape = rng.random()
            if shape < 0.4:
                lines.append(f"for i in range({rng.randint(0, 20)}):")
            elif shape < 0.7:
                low = rng.randint(0, 10)
                lines.append(f"for i in range({low}, {rng.randint(0, 20)}):")
            elif shape < 0.85:
                low = rng.randint(0, 5)
                lines.append(
                    f"for i in range({low}, {rng.randint(0, 20)}, {rng.randint(1, 4)}):"
                )
            else:
                elems = ", ".join(
                    str(rng.randrange(qubits)) for _ in range(rng.randint(0, 6))
                )
                lines.append(f"for i in [{elems}]:")
            lines.append(f"    {name}.measure(i, i)")
        elif roll < 0.9:
            variant = rng.choice(_VARIANTS)
            if variant == "measure":
                q = rng.randrange(qubits)
                lines.append(f"{name}.measure({q}, {q})")
            else:
                lines.append(f"{name}.{variant}()")
        else:
            lines.append(f"gt = Gate('g{rng.randrange(4)}', {rng.randint(2, 4)}, [])")
            if rng.random() < 0.5:
                lines.append(f"gt = {name}.to_instruction()")
    return "\n".join(lines) + "\n"


def mutate_program(source: str, rng: random.Random) -> str:
    """A plausible 'fix': random line-level edits of the generated program."""
    lines = source.splitlines()
    for _ in range(rng.randint(0, 3)):
        if not lines:
            break
        action = rng.random()
        idx = rng.randrange(len(lines))
        line = lines[idx]
        if action < 0.4:
            # Bump one integer literal; loop lines stay >= 1 so a range step
            # can never become zero.
            numbers = list(re.finditer(r"(?<![\w'])\d+", line))
            if numbers:
                m = rng.choice(numbers)
                floor = 1 if line.lstrip().startswith("for") else 0
                new_value = max(floor, int(m.group()) + rng.choice([-2, -1, 1, 2]))
                lines[idx] = line[: m.start()] + str(new_value) + line[m.end() :]
        elif action < 0.6:
            gate_call = re.match(r"^(\w+)\.(\w+)\(", line)
            if gate_call and gate_call.group(2) in _GATES_1Q:
                replacement = rng.choice(_GATES_1Q)
                lines[idx] = line.replace(f".{gate_call.group(2)}(", f".{replacement}(", 1)
        elif action < 0.8 and not line.startswith(("for", "    ")):
            lines[idx : idx + 1] = []
        else:
            # Never split a loop header from its body.
            positions = [
                p
                for p in range(len(lines) + 1)
                if p == 0 or not lines[p - 1].rstrip().endswith(":")
            ]
            new_line = (
                f"qc.h({rng.randrange(2)})"
                if rng.random() < 0.7
                else "gw = qc.to_instruction()"
            )
            lines.insert(rng.choice(positions), new_line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Independent text-level oracles for generated programs

_DECL_RE = re.compile(r"^(\w+) = QuantumCircuit\((\d+)(?:, (\d+))?\)$")
_H_RE = re.compile(r"^(\w+)\.h\((\d+)\)$")
_MEASURE_RE = re.compile(r"^(\w+)\.measure(?:_all|_inactive)?\(")
_RANGE_LOOP_RE = re.compile(r"^for \w+ in range\((\d+)(?:, (\d+))?(?:, (\d+))?\):$")
_LIST_LOOP_RE = re.compile(r"^for \w+ in \[([^\]]*)\]:$")


def oracle_circuits(source: str) -> dict[str, int]:
    circuits: dict[str, int] = {}
    for line in source.splitlines():
        m = _DECL_RE.match(line)
        if m:
            circuits[m.group(1)] = int(m.group(2))
    return circuits


def oracle_hadamard_counts(source: str) -> dict[str, dict[int, int]]:
    counts = {name: {q: 0 for q in range(size)} for name, size in oracle_circuits(source).items()}
    for line in source.splitlines():
        m = _H_RE.match(line.strip())
        if m and m.group(1) in counts:
            qubit = int(m.group(2))
            if qubit in counts[m.group(1)]:
                counts[m.group(1)][qubit] += 1
    return counts


def oracle_hadamard_verdict(buggy: str, fixed: str) -> bool:
    before = oracle_hadamard_counts(buggy)
    after = oracle_hadamard_counts(fixed)
    for circuit in set(before) & set(after):
        for qubit, count in before[circuit].items():
            fixed_count = after[circuit].get(qubit, 0)
            if count % 2 == 1 and fixed_count % 2 == 0 and fixed_count > 0:
                return True
    return False


def oracle_measure_totals(source: str) -> dict[str, int]:
    """Loop-unrolled measurement counts, using Python's range() directly."""
    totals = {name: 0 for name in oracle_circuits(source)}
    lines = source.splitlines()
    i = 0
    while i < len(lines):
        line = lines[i]
        if line.startswith(" "):
            i += 1  # stray indent outside a loop; the parser skips these too
            continue
        range_loop = _RANGE_LOOP_RE.match(line)
        list_loop = _LIST_LOOP_RE.match(line)
        if range_loop or list_loop:
            if range_loop:
                bounds = [int(b) for b in range_loop.groups() if b is not None]
                iterations = len(range(*bounds))
            else:
                body = list_loop.group(1).strip()
                iterations = len(body.split(",")) if body else 0
            i += 1
            while i < len(lines) and lines[i].startswith("    "):
                m = _MEASURE_RE.match(lines[i].strip())
                if m and m.group(1) in totals:
                    totals[m.group(1)] += iterations
                i += 1
            continue
        m = _MEASURE_RE.match(line.strip())
        if m and m.group(1) in totals:
            totals[m.group(1)] += 1
        i += 1
    return totals


def oracle_excessive_verdict(buggy: str, fixed: str) -> bool:
    before = oracle_measure_totals(buggy)
    after = oracle_measure_totals(fixed)
    return any(after[name] < before[name] for name in set(before) & set(after))
