"""Exception hierarchy shared by all components."""

from __future__ import annotations


class KBError(Exception):
    """Base class for everything this package raises on purpose."""


class ArityError(KBError):
    """A predicate or function symbol was used with two different arities."""


class ParseError(KBError):
    """Loading a knowledge base failed; carries the error diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class GroundingLimitError(KBError):
    """The ground instantiation exceeded the configured rule cap."""

    def __init__(self, limit: int, needed: int):
        self.limit = limit
        self.needed = needed
        super().__init__(
            f"grounding needs {needed} rule instances, cap is {limit}"
        )


class IncoherenceError(KBError):
    """A semantic state turned out contradictory (true and false overlap)."""


class SizeGuardError(KBError):
    """A brute-force oracle was asked to enumerate beyond its size guard."""

    def __init__(self, what: str, size: int, guard: int):
        self.size = size
        self.guard = guard
        super().__init__(f"{what}: |ka| = {size} exceeds guard {guard}")


class UnknownAtomError(KBError):
    """A queried atom is not among the known atoms at the used depth bound."""

    def __init__(self, atom, depth_bound: int):
        self.atom = atom
        self.depth_bound = depth_bound
        super().__init__(
            f"atom {atom} is not a known atom at depth bound k={depth_bound}"
        )
