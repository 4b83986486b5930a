"""ALC tableau reasoning over objective knowledge.

The objective knowledge for an atom set S is the ontology taken as a
first-order theory together with S read as ground facts.  Satisfiability
and entailment are decided natively on the concept syntax:

* concepts are normalized to negation normal form;
* every concept inclusion C subClassOf D is internalized as the
  disjunction ``not C or D`` added to every tableau node;
* fresh nodes introduced for existential restrictions are subset-blocked
  by earlier nodes, which guarantees termination;
* ground terms serve directly as individual names, with no equality
  reasoning between distinct terms.

Only DL atoms (concept atoms of arity 1 and role atoms of arity 2 whose
predicate occurs in the ontology) reach the tableau.  Non-DL atoms are
inert: they are entailed exactly when they are members of S, unless the
objective knowledge is unsatisfiable, in which case everything is
entailed.  A positive role atom is entailed exactly when asserted (ALC
has no role constructors, so a fresh witness can always replace a forced
successor), but a negated role atom does need a tableau run: universal
restrictions can make an edge between named individuals impossible.
Negated non-DL atoms are never entailed by satisfiable objective
knowledge, since S contains only positive facts.

Results are memoized per DL projection of S; cached and uncached answers
are indistinguishable and lookups are safe from concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .model import (
    And,
    Atom,
    AtomicConcept,
    Axiom,
    Bottom,
    Concept,
    ConceptAssertion,
    Exists,
    Forall,
    HybridKB,
    Not,
    Or,
    RoleAssertion,
    SubClassOf,
    Term,
    Top,
)

_MAX_TABLEAU_NODES = 20_000


def nnf(concept: Concept) -> Concept:
    """Negation normal form: negation only on atomic concepts."""
    if isinstance(concept, (Top, Bottom, AtomicConcept)):
        return concept
    if isinstance(concept, Not):
        return _nnf_negated(concept.operand)
    if isinstance(concept, And):
        return And(nnf(concept.left), nnf(concept.right))
    if isinstance(concept, Or):
        return Or(nnf(concept.left), nnf(concept.right))
    if isinstance(concept, Exists):
        return Exists(concept.role, nnf(concept.filler))
    if isinstance(concept, Forall):
        return Forall(concept.role, nnf(concept.filler))
    raise TypeError(f"not a concept: {concept!r}")


def _nnf_negated(concept: Concept) -> Concept:
    if isinstance(concept, Top):
        return Bottom()
    if isinstance(concept, Bottom):
        return Top()
    if isinstance(concept, AtomicConcept):
        return Not(concept)
    if isinstance(concept, Not):
        return nnf(concept.operand)
    if isinstance(concept, And):
        return Or(_nnf_negated(concept.left), _nnf_negated(concept.right))
    if isinstance(concept, Or):
        return And(_nnf_negated(concept.left), _nnf_negated(concept.right))
    if isinstance(concept, Exists):
        return Forall(concept.role, _nnf_negated(concept.filler))
    if isinstance(concept, Forall):
        return Exists(concept.role, _nnf_negated(concept.filler))
    raise TypeError(f"not a concept: {concept!r}")


def _concept_key(concept: Concept):
    return concept.sort_key()


class DLContext:
    """Tableau engine plus caches for one ontology.

    The same context is shared by every fixpoint computation over a KB;
    the caches are the only mutable state and behave as if each lookup
    recomputed its answer.
    """

    def __init__(
        self,
        ontology: tuple[Axiom, ...],
        concept_names: frozenset[str],
        role_names: frozenset[str],
    ):
        self.ontology = ontology
        self.concept_names = concept_names
        self.role_names = role_names
        self.internalized: tuple[Concept, ...] = tuple(
            sorted(
                (
                    nnf(Or(Not(ax.sub), ax.sup))
                    for ax in ontology
                    if isinstance(ax, SubClassOf)
                ),
                key=_concept_key,
            )
        )
        self._abox_concepts: tuple[tuple[Term, Concept], ...] = tuple(
            (ax.individual, nnf(ax.concept))
            for ax in ontology
            if isinstance(ax, ConceptAssertion)
        )
        self._abox_edges: tuple[tuple[Term, str, Term], ...] = tuple(
            (ax.subject, ax.role, ax.target)
            for ax in ontology
            if isinstance(ax, RoleAssertion)
        )
        self._abox_role_atoms = frozenset(
            Atom(role, (subj, obj)) for subj, role, obj in self._abox_edges
        )
        self._sat_cache: dict[frozenset[Atom], bool] = {}
        self._entail_cache: dict[tuple, bool] = {}
        self.hits = 0
        self.misses = 0

    @classmethod
    def for_kb(cls, kb: HybridKB) -> "DLContext":
        return cls(kb.ontology, kb.concept_names, kb.role_names)

    # -- classification ------------------------------------------------

    def is_concept_atom(self, atom: Atom) -> bool:
        return atom.arity == 1 and atom.predicate in self.concept_names

    def is_role_atom(self, atom: Atom) -> bool:
        return atom.arity == 2 and atom.predicate in self.role_names

    def is_dl_atom(self, atom: Atom) -> bool:
        return self.is_concept_atom(atom) or self.is_role_atom(atom)

    def dl_projection(self, atoms: Iterable[Atom]) -> frozenset[Atom]:
        return frozenset(a for a in atoms if self.is_dl_atom(a))

    @property
    def is_empty(self) -> bool:
        return not self.ontology

    # -- public queries -------------------------------------------------

    def satisfiable(self, atoms: Iterable[Atom]) -> bool:
        """Whether the ontology plus the atoms has a first-order model."""
        if self.is_empty:
            return True
        proj = self.dl_projection(atoms)
        cached = self._sat_cache.get(proj)
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        result = self._run_tableau(proj, ())
        self._sat_cache[proj] = result
        return result

    def entails_atom(self, atoms: frozenset[Atom], atom: Atom) -> bool:
        """Whether the objective knowledge for ``atoms`` entails ``atom``."""
        if self.is_empty:
            return atom in atoms
        if not self.satisfiable(atoms):
            return True
        if self.is_concept_atom(atom):
            key = (self.dl_projection(atoms), "entails", atom)
            cached = self._entail_cache.get(key)
            if cached is not None:
                self.hits += 1
                return cached
            self.misses += 1
            negated = Not(AtomicConcept(atom.predicate))
            result = not self._run_tableau(key[0], ((atom.args[0], negated),))
            self._entail_cache[key] = result
            return result
        if self.is_role_atom(atom):
            return atom in atoms or atom in self._abox_role_atoms
        return atom in atoms

    def entails_negated_atom(self, atoms: frozenset[Atom], atom: Atom) -> bool:
        """Whether the objective knowledge entails the negation of ``atom``."""
        if self.is_empty:
            return False
        if not self.satisfiable(atoms):
            return True
        if not self.is_dl_atom(atom):
            return False
        key = (self.dl_projection(atoms), "entails-neg", atom)
        cached = self._entail_cache.get(key)
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        if self.is_concept_atom(atom):
            asserted = AtomicConcept(atom.predicate)
            result = not self._run_tableau(key[0], ((atom.args[0], asserted),))
        else:
            edge = (atom.args[0], atom.predicate, atom.args[1])
            result = not self._run_tableau(key[0], (), (edge,))
        self._entail_cache[key] = result
        return result

    def clear_cache(self) -> None:
        self._sat_cache.clear()
        self._entail_cache.clear()
        self.hits = 0
        self.misses = 0

    # -- tableau ---------------------------------------------------------

    def _run_tableau(
        self,
        dl_atoms: frozenset[Atom],
        extra: tuple[tuple[Term, Concept], ...],
        extra_edges: tuple[tuple[Term, str, Term], ...] = (),
    ) -> bool:
        """True iff the assembled ABox is satisfiable.  ``extra`` holds
        additional NNF concept assertions and ``extra_edges`` additional
        role edges (both used for entailment queries)."""
        node_of: dict[Term, int] = {}
        labels: list[set[Concept]] = []
        edges: list[dict[str, set[int]]] = []

        def node_for(term: Term) -> int:
            idx = node_of.get(term)
            if idx is None:
                idx = len(labels)
                node_of[term] = idx
                labels.append(set(self.internalized))
                edges.append({})
            return idx

        assertions = list(self._abox_concepts) + list(extra)
        for atom in sorted(dl_atoms, key=lambda a: a.sort_key()):
            if self.is_concept_atom(atom):
                assertions.append((atom.args[0], AtomicConcept(atom.predicate)))
            else:
                subj, obj = atom.args
                edges[node_for(subj)].setdefault(atom.predicate, set()).add(
                    node_for(obj)
                )
        for subj, role, obj in self._abox_edges + extra_edges:
            edges[node_for(subj)].setdefault(role, set()).add(node_for(obj))
        for term, concept in assertions:
            labels[node_for(term)].add(concept)
        if not labels:
            # FOL domains are non-empty: check the pure TBox on one node.
            labels.append(set(self.internalized))
            edges.append({})
        return self._search(labels, edges, len(labels))

    def _search(
        self,
        labels: list[set[Concept]],
        edges: list[dict[str, set[int]]],
        named_count: int,
    ) -> bool:
        while True:
            if len(labels) > _MAX_TABLEAU_NODES:
                raise RuntimeError("tableau node limit exceeded")

            changed = True
            while changed:
                changed = False
                for idx in range(len(labels)):
                    label = labels[idx]
                    if self._has_clash(label):
                        return False
                    additions: set[Concept] = set()
                    # Snapshot: forall-propagation may add to this very
                    # label when the node has a role edge to itself.
                    for concept in tuple(label):
                        if isinstance(concept, And):
                            if concept.left not in label:
                                additions.add(concept.left)
                            if concept.right not in label:
                                additions.add(concept.right)
                        elif isinstance(concept, Forall):
                            for succ in edges[idx].get(concept.role, ()):
                                if concept.filler not in labels[succ]:
                                    labels[succ].add(concept.filler)
                                    changed = True
                    if additions:
                        label.update(additions)
                        changed = True

            choice = self._find_disjunction(labels)
            if choice is not None:
                idx, disjunction = choice
                for pick in (disjunction.left, disjunction.right):
                    branch_labels = [set(l) for l in labels]
                    branch_edges = [
                        {r: set(s) for r, s in e.items()} for e in edges
                    ]
                    branch_labels[idx].add(pick)
                    if self._search(branch_labels, branch_edges, named_count):
                        return True
                return False

            expansion = self._find_existential(labels, edges, named_count)
            if expansion is None:
                return True
            idx, existential = expansion
            new = len(labels)
            labels.append({existential.filler, *self.internalized})
            edges.append({})
            edges[idx].setdefault(existential.role, set()).add(new)

    @staticmethod
    def _has_clash(label: set[Concept]) -> bool:
        for concept in label:
            if isinstance(concept, Bottom):
                return True
            if isinstance(concept, Not) and concept.operand in label:
                return True
        return False

    @staticmethod
    def _find_disjunction(
        labels: list[set[Concept]],
    ) -> Optional[tuple[int, Or]]:
        for idx, label in enumerate(labels):
            pending = [
                c
                for c in label
                if isinstance(c, Or) and c.left not in label and c.right not in label
            ]
            if pending:
                return idx, min(pending, key=_concept_key)
        return None

    def _find_existential(
        self,
        labels: list[set[Concept]],
        edges: list[dict[str, set[int]]],
        named_count: int,
    ) -> Optional[tuple[int, Exists]]:
        for idx, label in enumerate(labels):
            if idx >= named_count and self._is_blocked(labels, idx):
                continue
            pending = [
                c
                for c in label
                if isinstance(c, Exists)
                and not any(
                    c.filler in labels[succ]
                    for succ in edges[idx].get(c.role, ())
                )
            ]
            if pending:
                return idx, min(pending, key=_concept_key)
        return None

    @staticmethod
    def _is_blocked(labels: list[set[Concept]], idx: int) -> bool:
        # Anywhere subset blocking: an earlier node whose label contains
        # this one's witnesses the same existential obligations.
        label = labels[idx]
        return any(label <= labels[earlier] for earlier in range(idx))


@dataclass(frozen=True)
class ObjectiveKnowledge:
    """An ontology context paired with a set of atoms taken as facts."""

    context: DLContext
    atoms: frozenset[Atom] = frozenset()

    def is_satisfiable(self) -> bool:
        return self.context.satisfiable(self.atoms)

    def entails_atom(self, atom: Atom) -> bool:
        return self.context.entails_atom(self.atoms, atom)

    def entails_negated_atom(self, atom: Atom) -> bool:
        return self.context.entails_negated_atom(self.atoms, atom)
