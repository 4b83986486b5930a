"""Brute-force ground truth: stable partitions and a random KB corpus.

A partition (P, N) of the known atoms is *stable* when

1. the objective knowledge for N is satisfiable;
2. P and N are closed under objective-knowledge entailment and the
   program evaluates to true under (P, ka - N);
3. every properly smaller sub-partition (P', N') escapes: some atom
   outside P' is entailed from P', or some atom outside N' is entailed
   from N', or the program with negative literals fixed by (P, ka - N)
   and positive literals read from (P', ka - N') evaluates to false.

Rule evaluation replaces literals by truth values (positive literals via
the K mode, negative literals via the not mode) and simplifies a fully
evaluated rule to ``true <-`` when the head value is at least the body
value and to ``false <-`` otherwise; a program is true when all rules
simplify to ``true <-`` (or it is empty) and false when some rule
simplifies to ``false <-``.

Everything here is exponential by design and guarded by explicit size
limits; it exists to verify the fixpoint engine at desk scale, not to
scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .engine import GroundContext, afp_trace, gamma, gamma_prime
from .errors import SizeGuardError
from .model import (
    And,
    Atom,
    AtomicConcept,
    Axiom,
    ConceptAssertion,
    HybridKB,
    Not,
    Partition,
    RoleAssertion,
    Rule,
    SubClassOf,
    Term,
    TruthValue,
    sort_atoms,
)

DEFAULT_STABLE_GUARD = 16
DEFAULT_ENUMERATION_GUARD = 12


class ProgramVerdict(Enum):
    TRUE = "true"
    FALSE = "false"
    NEITHER = "neither"

    def __str__(self) -> str:
        return self.value


class EvalMode(Enum):
    K_ONLY = "K-only"
    NOT_ONLY = "not-only"
    BOTH = "both"


@dataclass(frozen=True)
class EvaluatedRule:
    """A rule with some literals replaced by truth values.

    ``head`` and each body entry is either a still-unevaluated atom or a
    :class:`TruthValue`.  Negative body entries hold the value of the
    whole negative literal once evaluated.
    """

    head: object
    positives: tuple[object, ...]
    negatives: tuple[object, ...]

    def simplified(self) -> Optional[TruthValue]:
        """``TRUE``/``FALSE`` for a fully evaluated rule, else None."""
        values = (self.head, *self.positives, *self.negatives)
        if not all(isinstance(v, TruthValue) for v in values):
            return None
        body = min(
            (v for v in (*self.positives, *self.negatives)),
            default=TruthValue.TRUE,
        )
        return TruthValue.TRUE if self.head >= body else TruthValue.FALSE


def _value_of(atom: Atom, true_set: frozenset[Atom], false_set: frozenset[Atom]):
    if atom in true_set:
        return TruthValue.TRUE
    if atom in false_set:
        return TruthValue.FALSE
    return TruthValue.UNDEFINED


def evaluate_rule(
    rule: Rule | EvaluatedRule,
    true_set: frozenset[Atom],
    false_set: frozenset[Atom],
    mode: EvalMode,
) -> EvaluatedRule:
    """Replace literals by truth values in the requested mode.

    K mode evaluates the positive literals (head included); not mode
    evaluates the negative literals, where ``not a`` is true when ``a``
    is in the false set and false when it is in the true set.
    """
    if isinstance(rule, Rule):
        rule = EvaluatedRule(rule.head, rule.positive_body, rule.negative_body)
    head, positives, negatives = rule.head, rule.positives, rule.negatives
    if mode in (EvalMode.K_ONLY, EvalMode.BOTH):
        if isinstance(head, Atom):
            head = _value_of(head, true_set, false_set)
        positives = tuple(
            _value_of(a, true_set, false_set) if isinstance(a, Atom) else a
            for a in positives
        )
    if mode in (EvalMode.NOT_ONLY, EvalMode.BOTH):
        negatives = tuple(
            _value_of(a, true_set, false_set).negate() if isinstance(a, Atom) else a
            for a in negatives
        )
    return EvaluatedRule(head, positives, negatives)


def program_verdict(rules: Sequence[EvaluatedRule]) -> ProgramVerdict:
    verdicts = [rule.simplified() for rule in rules]
    if any(v is TruthValue.FALSE for v in verdicts):
        return ProgramVerdict.FALSE
    if all(v is TruthValue.TRUE for v in verdicts):
        return ProgramVerdict.TRUE
    return ProgramVerdict.NEITHER


def evaluate_program(
    rules: Sequence[Rule | EvaluatedRule],
    true_set: frozenset[Atom],
    false_set: frozenset[Atom],
    mode: EvalMode = EvalMode.BOTH,
) -> ProgramVerdict:
    """Evaluate every rule in the given mode and report the verdict.

    Requires disjoint true and false sets.  An empty program is true.
    """
    if true_set & false_set:
        raise ValueError("true and false sets must be disjoint")
    evaluated = [evaluate_rule(r, true_set, false_set, mode) for r in rules]
    return program_verdict(evaluated)


# ---------------------------------------------------------------------------
# Stable partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    candidate: Partition
    condition1: bool
    condition2: bool
    condition3: bool
    witness: Optional[tuple[frozenset[Atom], frozenset[Atom]]] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.condition1 and self.condition2 and self.condition3


def _entailed_closure(
    ctx: GroundContext,
    atoms: frozenset[Atom],
    memo: dict[frozenset[Atom], frozenset[Atom]],
) -> frozenset[Atom]:
    cached = memo.get(atoms)
    if cached is None:
        if ctx.dl.satisfiable(atoms):
            cached = (atoms & ctx.non_dl_ka) | frozenset(
                a for a in ctx.dl_ka if ctx.dl.entails_atom(atoms, a)
            )
        else:
            cached = ctx.ka
        memo[atoms] = cached
    return cached


_CHUNK_ROWS = 3**11


def _mixed_radix_chunks(radices: tuple[int, ...]) -> Iterator[np.ndarray]:
    """Digit matrices covering the whole mixed-radix space, in order.

    Yields int8 arrays of shape (rows, len(radices)); digit column i runs
    slowest for i = 0.  The first chunks are small: callers searching for
    an early hit (condition-3 witnesses cluster near the identity row)
    can then stop before paying for the full space.  Chunking also keeps
    the working set bounded for the 3^16 worst case the stability guard
    allows.
    """
    total = 1
    for r in radices:
        total *= r
    places = []
    acc = 1
    for r in reversed(radices):
        places.append(acc)
        acc *= r
    places.reverse()
    start = 0
    for rows in (2**9, 2**13):
        if start >= total:
            return
        yield _decode_digits(radices, places, start, min(start + rows, total))
        start += rows
    while start < total:
        yield _decode_digits(radices, places, start, min(start + _CHUNK_ROWS, total))
        start += _CHUNK_ROWS


def _decode_digits(
    radices: tuple[int, ...],
    places: list[int],
    start: int,
    stop: int,
) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((idx.shape[0], len(radices)), dtype=np.int8)
    for i, (radix, place) in enumerate(zip(radices, places)):
        digits[:, i] = (idx // place) % radix
    return digits


@dataclass
class _OracleTables:
    """Per-context tables shared by every candidate scan."""

    atoms: tuple[Atom, ...]
    index: dict[Atom, int]
    compiled: list[tuple[int, tuple[int, ...], tuple[int, ...]]]


def _tables(ctx: GroundContext) -> _OracleTables:
    tables = getattr(ctx, "_oracle_tables", None)
    if tables is None:
        atoms = sort_atoms(ctx.ka)
        index = {atom: i for i, atom in enumerate(atoms)}
        unique = {
            (
                index[rule.head],
                tuple(sorted(index[a] for a in rule.positive_body)),
                tuple(sorted(index[b] for b in rule.negative_body)),
            )
            for rule in ctx.program.rules
        }
        tables = _OracleTables(atoms, index, sorted(unique))
        ctx._oracle_tables = tables
    return tables


def _program_true_mask(
    compiled: list[tuple[int, tuple[int, ...], tuple[int, ...]]],
    values: np.ndarray,
) -> np.ndarray:
    """Row mask: the program evaluates to true under each value row."""
    rows = values.shape[0]
    ok = np.ones(rows, dtype=bool)
    body = np.empty(rows, dtype=np.int8)
    for head, positives, negatives in compiled:
        body.fill(TruthValue.TRUE)
        for i in positives:
            np.minimum(body, values[:, i], out=body)
        for j in negatives:
            np.minimum(body, 2 - values[:, j], out=body)
        ok &= values[:, head] >= body
    return ok


def _condition3_witness(
    ctx: GroundContext,
    p: frozenset[Atom],
    n: frozenset[Atom],
    memo: dict[frozenset[Atom], frozenset[Atom]],
) -> Optional[tuple[frozenset[Atom], frozenset[Atom]]]:
    """First properly smaller sub-partition with no escape, if any.

    Sub-partitions vary only on atoms of P (keep / drop to undefined /
    drop to false) and of N - P (keep undefined / drop to false); the
    program escape is evaluated in bulk with the negative literals fixed
    by (P, ka - N), while the two entailment escapes run per failing row
    against cached closures.
    """
    tables = _tables(ctx)
    atoms = tables.atoms
    in_p = [atom in p for atom in atoms]
    in_n = [atom in n for atom in atoms]
    movable = [i for i in range(len(atoms)) if in_n[i]]
    radices = tuple(3 if in_p[i] else 2 for i in movable)

    # Value of "not a" under the fixed outer pair (P, ka - N).
    not_values = [
        2 if not in_n[i] else (0 if in_p[i] else 1) for i in range(len(atoms))
    ]
    staged = [
        (
            head,
            positives,
            min((not_values[j] for j in negatives), default=2),
        )
        for head, positives, negatives in tables.compiled
    ]

    def program_escapes(values: list[int]) -> bool:
        for head, positives, fixed in staged:
            hv = values[head]
            if hv >= fixed:
                continue
            body = fixed
            for i in positives:
                v = values[i]
                if v < body:
                    body = v
                    if body <= hv:
                        break
            if body > hv:
                return True
        return False

    def entailment_escapes(
        p_sub: frozenset[Atom], n_sub: frozenset[Atom]
    ) -> bool:
        if bool(_entailed_closure(ctx, p_sub, memo) - p_sub):
            return True
        return bool(_entailed_closure(ctx, n_sub, memo) - n_sub)

    # Most failing candidates are witnessed by dropping a single atom, so
    # try those cheaply before paying for the bulk scan.
    base_values = [2 if in_p[i] else (1 if in_n[i] else 0) for i in range(len(atoms))]
    for i in movable:
        drops = (1, 0) if in_p[i] else (0,)
        for dropped in drops:
            values = list(base_values)
            values[i] = dropped
            if program_escapes(values):
                continue
            p_sub = p - {atoms[i]}
            n_sub = n - {atoms[i]} if dropped == 0 else n
            if entailment_escapes(p_sub, n_sub):
                continue
            return p_sub, n_sub

    base = np.zeros(len(atoms), dtype=np.int8)
    first_chunk = True
    for digits in _mixed_radix_chunks(radices):
        rows = digits.shape[0]
        values = np.tile(base, (rows, 1))
        for col, i in enumerate(movable):
            if radices[col] == 3:
                values[:, i] = 2 - digits[:, col]
            else:
                values[:, i] = 1 - digits[:, col]
        escaped = np.zeros(rows, dtype=bool)
        body = np.empty(rows, dtype=np.int8)
        for head, positives, fixed in staged:
            body.fill(fixed)
            for i in positives:
                np.minimum(body, values[:, i], out=body)
            escaped |= values[:, head] < body
        if first_chunk:
            escaped[0] = True  # the identity row (P' = P, N' = N) is skipped
            first_chunk = False
        for row in np.flatnonzero(~escaped):
            row_digits = digits[row]
            p_sub = frozenset(
                atoms[i]
                for col, i in enumerate(movable)
                if radices[col] == 3 and row_digits[col] == 0
            )
            n_sub = frozenset(
                atoms[i]
                for col, i in enumerate(movable)
                if row_digits[col] <= (1 if radices[col] == 3 else 0)
            )
            if _entailed_closure(ctx, p_sub, memo) - p_sub:
                continue
            if _entailed_closure(ctx, n_sub, memo) - n_sub:
                continue
            return p_sub, n_sub
    return None


def is_stable_partition(
    ctx: GroundContext,
    candidate: Partition,
    max_atoms: int = DEFAULT_STABLE_GUARD,
) -> StabilityReport:
    """Check the three stability conditions by direct enumeration."""
    ka = ctx.ka
    if len(ka) > max_atoms:
        raise SizeGuardError("stable-partition check", len(ka), max_atoms)
    if not (candidate.p <= candidate.n <= ka):
        raise ValueError("candidate is not a partition of the known atoms")
    p, n = candidate.p, candidate.n
    false_atoms = ka - n
    memo: dict[frozenset[Atom], frozenset[Atom]] = {}

    cond1 = ctx.dl.satisfiable(n)

    closure_p = _entailed_closure(ctx, p, memo)
    closure_n = _entailed_closure(ctx, n, memo)
    verdict = evaluate_program(ctx.program.rules, p, false_atoms, EvalMode.BOTH)
    cond2 = (
        closure_p <= p and closure_n <= n and verdict is ProgramVerdict.TRUE
    )
    detail = ""
    if not cond2:
        parts = []
        if not closure_p <= p:
            parts.append("P is not closed under entailment")
        if not closure_n <= n:
            parts.append("N is not closed under entailment")
        if verdict is not ProgramVerdict.TRUE:
            parts.append(f"program evaluates {verdict}")
        detail = "; ".join(parts)

    witness = _condition3_witness(ctx, p, n, memo)
    cond3 = witness is None

    return StabilityReport(candidate, cond1, cond2, cond3, witness, detail)


def enumerate_stable_partitions(
    ctx: GroundContext,
    max_atoms: int = DEFAULT_ENUMERATION_GUARD,
) -> list[Partition]:
    """All stable partitions, found by scanning every (P, N) candidate.

    Candidates are filtered by the bulk program check first, so only
    plausible partitions pay for entailment closures and condition 3.
    """
    ka = ctx.ka
    if len(ka) > max_atoms:
        raise SizeGuardError("stable-partition enumeration", len(ka), max_atoms)
    tables = _tables(ctx)
    atoms = tables.atoms
    memo: dict[frozenset[Atom], frozenset[Atom]] = {}

    found: list[Partition] = []
    for digits in _mixed_radix_chunks((3,) * len(atoms)):
        mask = _program_true_mask(tables.compiled, digits)
        for row in np.flatnonzero(mask):
            values = digits[row]
            p = frozenset(atoms[i] for i in range(len(atoms)) if values[i] == 2)
            n = frozenset(atoms[i] for i in range(len(atoms)) if values[i] >= 1)
            if _entailed_closure(ctx, p, memo) - p:
                continue
            if _entailed_closure(ctx, n, memo) - n:
                continue
            if not ctx.dl.satisfiable(n):
                continue
            if _condition3_witness(ctx, p, n, memo) is None:
                found.append(Partition(p, n))
    found.sort(key=_partition_key)
    return found


def _partition_key(part: Partition):
    return (
        tuple(a.sort_key() for a in sort_atoms(part.p)),
        tuple(a.sort_key() for a in sort_atoms(part.n)),
    )


# ---------------------------------------------------------------------------
# Coherence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherenceReport:
    coherent: bool
    p_omega: frozenset[Atom]
    n_omega: frozenset[Atom]
    partition_ok: bool
    fixpoint_equations_ok: bool
    objective_satisfiable: bool
    stability: Optional[StabilityReport]
    reasons: tuple[str, ...]


def check_coherence(
    ctx: GroundContext,
    stable_guard: int = 10,
) -> CoherenceReport:
    """Validate the alternating fixpoint partition as a well-founded model.

    Always checks that P stays inside N, that the limit satisfies both
    fixpoint equations, and that the objective knowledge for N is
    satisfiable.  When the known-atom set is small enough, additionally
    confirms stability by enumeration.
    """
    trace = afp_trace(ctx)
    p, n = trace.p_omega, trace.n_omega
    reasons: list[str] = []

    partition_ok = p <= n
    if not partition_ok:
        reasons.append("P is not included in N")

    fix_ok = partition_ok and gamma(ctx, n) == p and gamma_prime(ctx, p) == n
    if partition_ok and not fix_ok:
        reasons.append("limit does not satisfy the fixpoint equations")

    sat_ok = ctx.dl.satisfiable(n)
    if not sat_ok:
        reasons.append("objective knowledge for N is unsatisfiable")

    stability: Optional[StabilityReport] = None
    if partition_ok and fix_ok and sat_ok and len(ctx.ka) <= stable_guard:
        stability = is_stable_partition(
            ctx, Partition(p, n), max_atoms=stable_guard
        )
        if not stability.passed:
            failed = [
                name
                for name, ok in (
                    ("1", stability.condition1),
                    ("2", stability.condition2),
                    ("3", stability.condition3),
                )
                if not ok
            ]
            reasons.append(
                "stable-partition conditions " + ", ".join(failed) + " failed"
            )

    coherent = (
        partition_ok
        and fix_ok
        and sat_ok
        and (stability is None or stability.passed)
    )
    return CoherenceReport(
        coherent,
        p,
        n,
        partition_ok,
        fix_ok,
        sat_ok,
        stability,
        tuple(reasons),
    )


# ---------------------------------------------------------------------------
# Random function-free corpus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KBLimits:
    max_constants: int = 6
    max_predicates: int = 4
    max_rules: int = 8
    max_axioms: int = 4


def write_corpus(directory, seeds, limits: "KBLimits" = None) -> list[str]:
    """Write seeded corpus KBs as .hkb files, one per seed.

    Each file starts with a comment header recording the seed, so any
    corpus member can be regenerated or inspected independently.
    Returns the written paths in seed order.
    """
    import pathlib

    from .parser import kb_to_text

    limits = limits or KBLimits()
    target = pathlib.Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for seed in seeds:
        kb = random_kb(seed, limits)
        path = target / f"corpus_{seed:04d}.hkb"
        path.write_text(
            f"% generated corpus member, seed: {seed}\n" + kb_to_text(kb),
            encoding="utf-8",
        )
        written.append(str(path))
    return written


def random_kb(seed: int, limits: KBLimits = KBLimits()) -> HybridKB:
    """A deterministic, DL-safe, function-free KB drawn from a seed.

    Rule variables always occur in a positive non-DL body atom chosen
    first, so every generated rule is DL-safe by construction.  Ontology
    axioms are drawn from simple inclusions (possibly negated or
    conjunctive on the left) and assertions.
    """
    rng = random.Random(seed)
    constants = [f"c{i}" for i in range(1, rng.randint(1, max(1, limits.max_constants)) + 1)]
    n_preds = rng.randint(1, max(1, limits.max_predicates))
    predicates = [(f"p{i}", rng.choice((0, 1, 1, 1, 2))) for i in range(1, n_preds + 1)]

    n_axioms = rng.randint(0, limits.max_axioms)
    concept_pool = ["a1", "a2"]
    role_pool = ["r1"]
    axioms: list[Axiom] = []
    used_concepts: set[str] = set()
    used_roles: set[str] = set()
    for _ in range(n_axioms):
        shape = rng.choices(
            ("sub", "sub-neg", "sub-conj", "concept-assert", "role-assert"),
            weights=(8, 2, 3, 4, 2),
        )[0]
        if shape == "sub":
            a, b = rng.choice(concept_pool), rng.choice(concept_pool)
            axioms.append(SubClassOf(AtomicConcept(a), AtomicConcept(b)))
            used_concepts.update((a, b))
        elif shape == "sub-neg":
            a, b = rng.sample(concept_pool, 2)
            axioms.append(SubClassOf(AtomicConcept(a), Not(AtomicConcept(b))))
            used_concepts.update((a, b))
        elif shape == "sub-conj":
            a, b = rng.choice(concept_pool), rng.choice(concept_pool)
            c = rng.choice(concept_pool)
            axioms.append(
                SubClassOf(And(AtomicConcept(a), AtomicConcept(b)), AtomicConcept(c))
            )
            used_concepts.update((a, b, c))
        elif shape == "concept-assert":
            a = rng.choice(concept_pool)
            axioms.append(
                ConceptAssertion(Term(rng.choice(constants)), AtomicConcept(a))
            )
            used_concepts.add(a)
        else:
            role = rng.choice(role_pool)
            axioms.append(
                RoleAssertion(
                    Term(rng.choice(constants)), Term(rng.choice(constants)), role
                )
            )
            used_roles.add(role)

    head_pool: list[tuple[str, int]] = list(predicates)
    head_pool += [(c, 1) for c in sorted(used_concepts)]
    head_pool += [(r, 2) for r in sorted(used_roles)]
    body_pool = list(head_pool)

    def fresh_atom(pred: str, arity: int, pool: Sequence[str], rng: random.Random) -> Atom:
        return Atom(pred, tuple(Term(rng.choice(pool)) for _ in range(arity)))

    rules: list[Rule] = []
    n_rules = rng.randint(1, max(1, limits.max_rules))
    for _ in range(n_rules):
        # Positive non-DL guard atoms come first and own every variable,
        # which makes the rule DL-safe by construction.
        n_guards = rng.choices((0, 1, 2), weights=(4, 5, 2))[0]
        guards: list[Atom] = []
        var_pool: list[str] = []
        for _ in range(n_guards):
            pred, arity = rng.choice(predicates)
            args = []
            for _ in range(arity):
                if rng.random() < 0.55:
                    var = rng.choice(("X", "Y"))
                    if var not in var_pool:
                        var_pool.append(var)
                    args.append(Term(var))
                else:
                    args.append(Term(rng.choice(constants)))
            guards.append(Atom(pred, tuple(args)))

        def pool_atom() -> Atom:
            pred, arity = rng.choice(body_pool)
            args = tuple(
                Term(rng.choice(var_pool))
                if var_pool and rng.random() < 0.5
                else Term(rng.choice(constants))
                for _ in range(arity)
            )
            return Atom(pred, args)

        head = pool_atom()
        positives = guards + [pool_atom() for _ in range(rng.randint(0, 1))]
        negatives = [
            pool_atom()
            for _ in range(rng.choices((0, 1, 2), weights=(5, 4, 1))[0])
        ]
        rules.append(Rule(head, tuple(positives), tuple(negatives)))

    return HybridKB(tuple(axioms), tuple(rules))
