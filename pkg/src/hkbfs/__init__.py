"""Well-founded reasoning for MKNF hybrid knowledge bases with function symbols."""

from .diagnostics import Diagnostic, Severity, SourceSpan
from .dl import DLContext, ObjectiveKnowledge
from .engine import (
    AFPTrace,
    CompareReport,
    GroundContext,
    IFPTrace,
    PositiveGroundKB,
    alternating_fixpoint_partition,
    compare_semantics,
    ground_context,
    iterated_fixpoint,
    query,
)
from .errors import (
    ArityError,
    GroundingLimitError,
    IncoherenceError,
    KBError,
    ParseError,
    SizeGuardError,
    UnknownAtomError,
)
from .grounding import GroundProgram, KnownAtoms, ground_program, herbrand_universe
from .model import (
    Atom,
    HybridKB,
    Interpretation,
    Partition,
    Rule,
    Term,
    TruthValue,
    canonical_order,
    term_depth,
)
from .oracle import (
    CoherenceReport,
    KBLimits,
    StabilityReport,
    check_coherence,
    enumerate_stable_partitions,
    evaluate_program,
    is_stable_partition,
    random_kb,
)
from .parser import kb_to_text, load_kb, parse_ground_atom, parse_kb, validate_dl_safety

__version__ = "0.1.0"

__all__ = [
    "AFPTrace",
    "ArityError",
    "Atom",
    "CompareReport",
    "CoherenceReport",
    "Diagnostic",
    "DLContext",
    "GroundContext",
    "GroundProgram",
    "GroundingLimitError",
    "HybridKB",
    "IFPTrace",
    "IncoherenceError",
    "Interpretation",
    "KBError",
    "KBLimits",
    "KnownAtoms",
    "ObjectiveKnowledge",
    "ParseError",
    "Partition",
    "PositiveGroundKB",
    "Rule",
    "Severity",
    "SizeGuardError",
    "SourceSpan",
    "StabilityReport",
    "Term",
    "TruthValue",
    "UnknownAtomError",
    "alternating_fixpoint_partition",
    "canonical_order",
    "check_coherence",
    "compare_semantics",
    "enumerate_stable_partitions",
    "evaluate_program",
    "ground_context",
    "ground_program",
    "herbrand_universe",
    "is_stable_partition",
    "iterated_fixpoint",
    "kb_to_text",
    "load_kb",
    "parse_ground_atom",
    "parse_kb",
    "query",
    "random_kb",
    "term_depth",
    "validate_dl_safety",
]
