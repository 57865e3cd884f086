"""Loading of buggy/fixed code pairs and labeled corpora from disk.

A corpus is a directory of case subdirectories, each holding ``buggy.py``,
``fixed.py`` and an optional ``expected.json`` with the pattern labels:

    {"patterns": ["incorrect_measurement", ...]}

An empty ``patterns`` array marks a negative example for all patterns.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .detectors import PatternId


class IoError(Exception):
    """A required file or directory could not be read; names the path."""


@dataclass(frozen=True)
class CodePair:
    pair_id: str
    buggy_source: str
    fixed_source: str
    buggy_path: str = ""
    fixed_path: str = ""


@dataclass(frozen=True)
class CorpusCase:
    name: str
    pair: CodePair | None
    expected_patterns: frozenset[PatternId]
    error: str | None = None


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _common_stem(buggy_path: Path, fixed_path: Path) -> str:
    try:
        common = Path(os.path.commonpath([buggy_path, fixed_path]))
    except ValueError:
        common = None
    if common is not None and common.name:
        return common.name
    return f"{buggy_path.stem}__{fixed_path.stem}"


def load_pair(buggy_path: str | Path, fixed_path: str | Path) -> CodePair:
    """Load a code pair, deriving the pair id from the common path stem."""
    buggy_path = Path(buggy_path)
    fixed_path = Path(fixed_path)
    buggy_source = _read_text(buggy_path)
    fixed_source = _read_text(fixed_path)
    return CodePair(
        pair_id=_common_stem(buggy_path, fixed_path),
        buggy_source=buggy_source,
        fixed_source=fixed_source,
        buggy_path=str(buggy_path),
        fixed_path=str(fixed_path),
    )


_KNOWN_PATTERNS = {p.value: p for p in PatternId}


def _load_expected(path: Path) -> frozenset[PatternId]:
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict) or not isinstance(data.get("patterns"), list):
        raise ValueError('expected.json must be an object with a "patterns" array')
    patterns = set()
    for item in data["patterns"]:
        if item not in _KNOWN_PATTERNS:
            raise ValueError(f"unknown pattern id {item!r}")
        patterns.add(_KNOWN_PATTERNS[item])
    return frozenset(patterns)


def scan_corpus(root: str | Path) -> tuple[CorpusCase, ...]:
    """Enumerate corpus cases sorted by directory name.

    A missing ``expected.json`` yields empty expected patterns.  A malformed
    case becomes an error entry; it never suppresses the other cases.
    """
    root = Path(root)
    if not root.is_dir():
        raise IoError(f"cannot read corpus root {root}: not a directory")
    cases: list[CorpusCase] = []
    for case_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        buggy = case_dir / "buggy.py"
        fixed = case_dir / "fixed.py"
        expected_file = case_dir / "expected.json"
        missing = [p.name for p in (buggy, fixed) if not p.is_file()]
        if missing:
            cases.append(
                CorpusCase(
                    name=case_dir.name,
                    pair=None,
                    expected_patterns=frozenset(),
                    error=f"missing {', '.join(missing)}",
                )
            )
            continue
        try:
            pair = load_pair(buggy, fixed)
        except IoError as exc:
            cases.append(CorpusCase(case_dir.name, None, frozenset(), str(exc)))
            continue
        expected: frozenset[PatternId] = frozenset()
        error = None
        if expected_file.is_file():
            try:
                expected = _load_expected(expected_file)
            except (ValueError, OSError) as exc:
                error = f"malformed expected.json: {exc}"
        cases.append(CorpusCase(case_dir.name, pair, expected, error))
    return tuple(cases)
