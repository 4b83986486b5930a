"""Depth-bounded ground instantiation and the known-atom set.

With function symbols the Herbrand universe is infinite, so grounding is
truncated: substitutions draw from the ground terms of depth at most ``k``.
Rule instances are kept whole, which means atoms built from nested
function applications in rule bodies or heads may exceed depth ``k``;
the known atoms are exactly the atoms occurring in the ground instances.
For a function-free KB the result is the classical grounding over the
constants and does not depend on ``k``.

The engine computes the exact semantics of the truncated program.  Atoms
whose derivations would need terms deeper than the bound can differ from
the untruncated semantics, so every reported answer carries ``k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import GroundingLimitError
from .model import Atom, HybridKB, Rule, Substitution, Term, sort_atoms

DEFAULT_MAX_GROUND_RULES = 10_000_000

# Injected when a KB has no constants at all, so the universe (and with it
# the objective knowledge) stays well defined.
RESERVED_CONSTANT = "c0"


@dataclass(frozen=True)
class GroundProgram:
    """Ground rule instances plus their origin (source rule, substitution)."""

    rules: tuple[Rule, ...]
    origins: tuple[tuple[Rule, tuple[tuple[str, Term], ...]], ...]

    def origin_of(self, index: int) -> tuple[Rule, dict[str, Term]]:
        source, binding = self.origins[index]
        return source, dict(binding)


@dataclass(frozen=True)
class KnownAtoms:
    """The atoms occurring in the ground program, canonically ordered."""

    atoms: tuple[Atom, ...]
    depth_bound: int

    @cached_property
    def atom_set(self) -> frozenset[Atom]:
        return frozenset(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atom_set


def herbrand_universe(kb: HybridKB, depth_bound: int) -> tuple[Term, ...]:
    """All ground terms of depth <= depth_bound, canonically ordered.

    Uses the KB's constants and function symbols; a KB without constants
    gets the reserved constant ``c0``.
    """
    if depth_bound < 0:
        raise ValueError("depth bound must be >= 0")
    constants = kb.constants or (RESERVED_CONSTANT,)
    terms: list[Term] = [Term(name) for name in constants]
    functions = sorted(kb.function_arities.items())
    for depth in range(1, depth_bound + 1):
        layer = [
            candidate
            for name, arity in functions
            for args in itertools.product(terms, repeat=arity)
            if (candidate := Term(name, tuple(args))).depth == depth
        ]
        if not layer:
            break
        terms += layer
    return tuple(sorted(terms, key=lambda t: t.sort_key()))


def ground_program(
    kb: HybridKB,
    depth_bound: int,
    max_rules: int = DEFAULT_MAX_GROUND_RULES,
) -> tuple[GroundProgram, KnownAtoms]:
    """Instantiate every rule with every substitution into the universe.

    Deterministic: rules keep source order and substitutions follow the
    canonical term order.  Raises :class:`GroundingLimitError` before
    materializing more than ``max_rules`` instances.
    """
    universe = herbrand_universe(kb, depth_bound)
    total = 0
    for rule in kb.program:
        count = len(universe) ** len(rule.variables())
        total += count
        if total > max_rules:
            raise GroundingLimitError(max_rules, total)

    rules: list[Rule] = []
    origins: list[tuple[Rule, tuple[tuple[str, Term], ...]]] = []
    atoms: set[Atom] = set()
    for rule in kb.program:
        variables = rule.variables()
        if not variables:
            rules.append(rule)
            origins.append((rule, ()))
            atoms.update(rule.atoms())
            continue
        for values in itertools.product(universe, repeat=len(variables)):
            binding: Substitution = dict(zip(variables, values))
            instance = rule.substitute(binding)
            rules.append(instance)
            origins.append((rule, tuple(sorted(binding.items()))))
            atoms.update(instance.atoms())

    program = GroundProgram(tuple(rules), tuple(origins))
    known = KnownAtoms(sort_atoms(atoms), depth_bound)
    return program, known
