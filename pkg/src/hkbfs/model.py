"""Core syntax and semantic state for MKNF hybrid knowledge bases.

A hybrid knowledge base pairs an ALC ontology with a normal logic program
whose rules may contain function applications.  This module defines the
shared vocabulary: terms, atoms and rules on the program side; concepts
and axioms on the ontology side; and the two partition-shaped semantic
states (three-valued interpretations and known-atom partitions) that the
fixpoint engine and the oracle manipulate.

All values are immutable and hashable, so they can be shared across
threads and used as set members.  Every type has a canonical sort key,
which keeps engine output deterministic across runs.

Lexical convention: variable names start with an uppercase letter or an
underscore; constant, function, predicate, concept and role names start
with a lowercase letter or a digit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional

from .diagnostics import SourceSpan
from .errors import ArityError, IncoherenceError, KBError


def is_variable_name(name: str) -> bool:
    return bool(name) and (name[0].isupper() or name[0] == "_")


# ---------------------------------------------------------------------------
# Truth values
# ---------------------------------------------------------------------------


class TruthValue(IntEnum):
    """Three-valued query result, ordered false < undefined < true."""

    FALSE = 0
    UNDEFINED = 1
    TRUE = 2

    def negate(self) -> "TruthValue":
        return TruthValue(2 - self.value)

    def __str__(self) -> str:
        return self.name.lower()


# ---------------------------------------------------------------------------
# Terms, atoms, rules
# ---------------------------------------------------------------------------

Substitution = Mapping[str, "Term"]


@dataclass(frozen=True)
class Term:
    """A variable, a constant, or a function application.

    The kind is determined by the lexical class of ``name`` together with
    ``args``: an uppercase-initial name is a variable and must have no
    arguments; a lowercase-initial name is a constant when ``args`` is
    empty and a function application otherwise.
    """

    name: str
    args: tuple["Term", ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("term name must be non-empty")
        if is_variable_name(self.name) and self.args:
            raise ValueError(f"variable {self.name!r} cannot take arguments")

    @property
    def is_variable(self) -> bool:
        return is_variable_name(self.name)

    @cached_property
    def is_ground(self) -> bool:
        if self.is_variable:
            return False
        return all(a.is_ground for a in self.args)

    @cached_property
    def depth(self) -> int:
        """0 for constants and variables, 1 + max argument depth otherwise."""
        if not self.args:
            return 0
        return 1 + max(a.depth for a in self.args)

    def variables(self) -> Iterator[str]:
        if self.is_variable:
            yield self.name
        for a in self.args:
            yield from a.variables()

    def subterms(self) -> Iterator["Term"]:
        yield self
        for a in self.args:
            yield from a.subterms()

    def substitute(self, subst: Substitution) -> "Term":
        if self.is_variable:
            return subst.get(self.name, self)
        if not self.args:
            return self
        return Term(self.name, tuple(a.substitute(subst) for a in self.args))

    def sort_key(self):
        return (
            0 if not self.args else 1,
            self.name,
            tuple(a.sort_key() for a in self.args),
        )

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


def term_depth(term: Term) -> int:
    return term.depth


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @cached_property
    def is_ground(self) -> bool:
        return all(a.is_ground for a in self.args)

    @cached_property
    def depth(self) -> int:
        return max((a.depth for a in self.args), default=0)

    def variables(self) -> Iterator[str]:
        for a in self.args:
            yield from a.variables()

    def substitute(self, subst: Substitution) -> "Atom":
        if not self.args:
            return self
        return Atom(self.predicate, tuple(a.substitute(subst) for a in self.args))

    def sort_key(self):
        return (self.predicate, self.arity, tuple(a.sort_key() for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


def atom_key(atom: Atom):
    return atom.sort_key()


def canonical_order(a: Atom, b: Atom) -> int:
    """Total deterministic order on ground atoms: -1, 0 or 1."""
    ka, kb = a.sort_key(), b.sort_key()
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


def sort_atoms(atoms: Iterable[Atom]) -> tuple[Atom, ...]:
    return tuple(sorted(atoms, key=atom_key))


def format_atom_set(atoms: Iterable[Atom]) -> str:
    return "{" + ", ".join(str(a) for a in sort_atoms(atoms)) + "}"


@dataclass(frozen=True)
class Rule:
    """``head :- a1, ..., an, not b1, ..., not bm``; a fact has empty bodies."""

    head: Atom
    positive_body: tuple[Atom, ...] = ()
    negative_body: tuple[Atom, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def is_fact(self) -> bool:
        return not self.positive_body and not self.negative_body

    @cached_property
    def is_ground(self) -> bool:
        return all(a.is_ground for a in self.atoms())

    def atoms(self) -> tuple[Atom, ...]:
        return (self.head, *self.positive_body, *self.negative_body)

    def variables(self) -> tuple[str, ...]:
        """Variable names in first-occurrence order."""
        seen: dict[str, None] = {}
        for atom in self.atoms():
            for v in atom.variables():
                seen.setdefault(v)
        return tuple(seen)

    def substitute(self, subst: Substitution) -> "Rule":
        return Rule(
            self.head.substitute(subst),
            tuple(a.substitute(subst) for a in self.positive_body),
            tuple(a.substitute(subst) for a in self.negative_body),
            span=self.span,
        )

    def __str__(self) -> str:
        if self.is_fact:
            return f"{self.head}."
        body = [str(a) for a in self.positive_body]
        body += [f"not {a}" for a in self.negative_body]
        return f"{self.head} :- {', '.join(body)}."


# ---------------------------------------------------------------------------
# ALC concepts and axioms
# ---------------------------------------------------------------------------


class Concept:
    """Base class of the ALC concept AST."""

    def concept_names(self) -> Iterator[str]:
        return iter(())

    def role_names(self) -> Iterator[str]:
        return iter(())

    def sort_key(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Top(Concept):
    def sort_key(self):
        return (0,)

    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Bottom(Concept):
    def sort_key(self):
        return (1,)

    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class AtomicConcept(Concept):
    name: str

    def concept_names(self) -> Iterator[str]:
        yield self.name

    def sort_key(self):
        return (2, self.name)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not(Concept):
    operand: Concept

    def concept_names(self) -> Iterator[str]:
        return self.operand.concept_names()

    def role_names(self) -> Iterator[str]:
        return self.operand.role_names()

    def sort_key(self):
        return (3, self.operand.sort_key())

    def __str__(self) -> str:
        return f"not {_braced(self.operand)}"


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept

    def concept_names(self) -> Iterator[str]:
        yield from self.left.concept_names()
        yield from self.right.concept_names()

    def role_names(self) -> Iterator[str]:
        yield from self.left.role_names()
        yield from self.right.role_names()

    def sort_key(self):
        return (4, self.left.sort_key(), self.right.sort_key())

    def __str__(self) -> str:
        return f"{_braced(self.left)} and {_braced(self.right)}"


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept

    def concept_names(self) -> Iterator[str]:
        yield from self.left.concept_names()
        yield from self.right.concept_names()

    def role_names(self) -> Iterator[str]:
        yield from self.left.role_names()
        yield from self.right.role_names()

    def sort_key(self):
        return (5, self.left.sort_key(), self.right.sort_key())

    def __str__(self) -> str:
        return f"{_braced(self.left)} or {_braced(self.right)}"


@dataclass(frozen=True)
class Exists(Concept):
    role: str
    filler: Concept

    def concept_names(self) -> Iterator[str]:
        return self.filler.concept_names()

    def role_names(self) -> Iterator[str]:
        yield self.role
        yield from self.filler.role_names()

    def sort_key(self):
        return (6, self.role, self.filler.sort_key())

    def __str__(self) -> str:
        return f"exists {self.role}. {self.filler}"


@dataclass(frozen=True)
class Forall(Concept):
    role: str
    filler: Concept

    def concept_names(self) -> Iterator[str]:
        return self.filler.concept_names()

    def role_names(self) -> Iterator[str]:
        yield self.role
        yield from self.filler.role_names()

    def sort_key(self):
        return (7, self.role, self.filler.sort_key())

    def __str__(self) -> str:
        return f"forall {self.role}. {self.filler}"


def _braced(c: Concept) -> str:
    # Conservative parentheses: a compound child is always wrapped, which
    # keeps printing unambiguous under "quantifiers take the longest
    # concept to the right".
    if isinstance(c, (Top, Bottom, AtomicConcept)):
        return str(c)
    return f"({c})"


class Axiom:
    """Base class of ontology axioms."""


@dataclass(frozen=True)
class SubClassOf(Axiom):
    sub: Concept
    sup: Concept

    def __str__(self) -> str:
        return f"{self.sub} subClassOf {self.sup}."


@dataclass(frozen=True)
class ConceptAssertion(Axiom):
    individual: Term
    concept: Concept

    def __post_init__(self) -> None:
        if not self.individual.is_ground:
            raise ValueError(f"assertion individual {self.individual} is not ground")

    def __str__(self) -> str:
        return f"{self.individual} : {self.concept}."


@dataclass(frozen=True)
class RoleAssertion(Axiom):
    subject: Term
    target: Term
    role: str

    def __post_init__(self) -> None:
        if not (self.subject.is_ground and self.target.is_ground):
            raise ValueError("role assertion individuals must be ground")

    def __str__(self) -> str:
        return f"({self.subject}, {self.target}) : {self.role}."


def axiom_concepts(axiom: Axiom) -> Iterator[Concept]:
    if isinstance(axiom, SubClassOf):
        yield axiom.sub
        yield axiom.sup
    elif isinstance(axiom, ConceptAssertion):
        yield axiom.concept


def axiom_individuals(axiom: Axiom) -> Iterator[Term]:
    if isinstance(axiom, ConceptAssertion):
        yield axiom.individual
    elif isinstance(axiom, RoleAssertion):
        yield axiom.subject
        yield axiom.target


# ---------------------------------------------------------------------------
# The knowledge base
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HybridKB:
    """An ontology plus a normal logic program over one shared signature.

    Construction validates the signature: every predicate and every
    function symbol must be used with a single arity, and a program
    predicate that shares its name with an ontology concept (role) must
    have arity 1 (arity 2).
    """

    ontology: tuple[Axiom, ...] = ()
    program: tuple[Rule, ...] = ()

    def __post_init__(self) -> None:
        self._validate()

    # -- signature ---------------------------------------------------------

    @cached_property
    def predicate_arities(self) -> dict[str, int]:
        arities: dict[str, int] = {}
        for rule in self.program:
            for atom in rule.atoms():
                known = arities.setdefault(atom.predicate, atom.arity)
                if known != atom.arity:
                    raise ArityError(
                        f"predicate {atom.predicate} used with arities "
                        f"{known} and {atom.arity}"
                    )
        return arities

    @cached_property
    def function_arities(self) -> dict[str, int]:
        """Arities of non-constant function symbols (constants excluded)."""
        arities: dict[str, int] = {}
        for term in self._all_terms():
            for sub in term.subterms():
                if sub.is_variable:
                    continue
                known = arities.setdefault(sub.name, len(sub.args))
                if known != len(sub.args):
                    raise ArityError(
                        f"function symbol {sub.name} used with arities "
                        f"{known} and {len(sub.args)}"
                    )
        return {n: a for n, a in arities.items() if a > 0}

    @cached_property
    def constants(self) -> tuple[str, ...]:
        names = set()
        for term in self._all_terms():
            for sub in term.subterms():
                if not sub.is_variable and not sub.args:
                    names.add(sub.name)
        return tuple(sorted(names))

    @cached_property
    def concept_names(self) -> frozenset[str]:
        names = set()
        for axiom in self.ontology:
            for concept in axiom_concepts(axiom):
                names.update(concept.concept_names())
        return frozenset(names)

    @cached_property
    def role_names(self) -> frozenset[str]:
        names = set()
        for axiom in self.ontology:
            if isinstance(axiom, RoleAssertion):
                names.add(axiom.role)
            for concept in axiom_concepts(axiom):
                names.update(concept.role_names())
        return frozenset(names)

    @cached_property
    def dl_predicates(self) -> frozenset[tuple[str, int]]:
        """Program predicates evaluated under the ontology (open world)."""
        dl = set()
        for name, arity in self.predicate_arities.items():
            if arity == 1 and name in self.concept_names:
                dl.add((name, 1))
            elif arity == 2 and name in self.role_names:
                dl.add((name, 2))
        return frozenset(dl)

    @property
    def is_function_free(self) -> bool:
        return not self.function_arities

    def is_dl_atom(self, atom: Atom) -> bool:
        return (atom.predicate, atom.arity) in self.dl_predicates

    def _all_terms(self) -> Iterator[Term]:
        for rule in self.program:
            for atom in rule.atoms():
                yield from atom.args
        for axiom in self.ontology:
            yield from axiom_individuals(axiom)

    def _validate(self) -> None:
        preds = self.predicate_arities
        self.function_arities
        for name, arity in preds.items():
            in_concepts = name in self.concept_names
            in_roles = name in self.role_names
            if not in_concepts and not in_roles:
                continue
            if (arity == 1 and in_concepts) or (arity == 2 and in_roles):
                continue
            wanted = []
            if in_concepts:
                wanted.append("1 (concept)")
            if in_roles:
                wanted.append("2 (role)")
            raise KBError(
                f"predicate {name}/{arity} collides with ontology name "
                f"{name}; expected arity {' or '.join(wanted)}"
            )


# ---------------------------------------------------------------------------
# Semantic state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interpretation:
    """A three-valued interpretation: disjoint true and false atom sets.

    Ordered componentwise: ``i <= j`` iff both the true and the false set
    of ``i`` are included in those of ``j``.
    """

    true_atoms: frozenset[Atom] = frozenset()
    false_atoms: frozenset[Atom] = frozenset()

    def __post_init__(self) -> None:
        overlap = self.true_atoms & self.false_atoms
        if overlap:
            raise IncoherenceError(
                "true and false sets overlap on " + format_atom_set(overlap)
            )

    def leq(self, other: "Interpretation") -> bool:
        return (
            self.true_atoms <= other.true_atoms
            and self.false_atoms <= other.false_atoms
        )

    def truth_of(self, atom: Atom) -> TruthValue:
        if atom in self.true_atoms:
            return TruthValue.TRUE
        if atom in self.false_atoms:
            return TruthValue.FALSE
        return TruthValue.UNDEFINED

    def __str__(self) -> str:
        return (
            f"<{format_atom_set(self.true_atoms)}, "
            f"{format_atom_set(self.false_atoms)}>"
        )



@dataclass(frozen=True)
class Partition:
    """A pair (P, N) with P included in N; exact iff P equals N.

    P collects the atoms derived true, N the atoms not derived false.
    """

    p: frozenset[Atom] = frozenset()
    n: frozenset[Atom] = frozenset()

    def __post_init__(self) -> None:
        if not self.p <= self.n:
            raise IncoherenceError(
                "partition has P not included in N; extra atoms "
                + format_atom_set(self.p - self.n)
            )

    @property
    def is_exact(self) -> bool:
        return self.p == self.n

    def __str__(self) -> str:
        return f"({format_atom_set(self.p)}, {format_atom_set(self.n)})"

