"""qpac: bug-fix pattern classification for Qiskit-style code pairs."""

from .detectors import (
    DetectionReport,
    Evidence,
    PatternId,
    PatternVerdict,
    detect_all,
)
from .filters import PatternClass, coarse_classify
from .pairio import CodePair, CorpusCase, IoError, load_pair, scan_corpus
from .pyast import ModuleAst, ParseError, dump, fold_constants, parse
from .semantics import (
    STANDARD_GATES,
    DetectionContext,
    build_context,
    load_gate_table,
)

__version__ = "0.1.0"

__all__ = [
    "CodePair",
    "CorpusCase",
    "DetectionContext",
    "DetectionReport",
    "Evidence",
    "IoError",
    "ModuleAst",
    "ParseError",
    "PatternClass",
    "PatternId",
    "PatternVerdict",
    "STANDARD_GATES",
    "build_context",
    "coarse_classify",
    "detect_all",
    "dump",
    "fold_constants",
    "load_gate_table",
    "load_pair",
    "parse",
    "scan_corpus",
    "__version__",
]
