"""Both fixpoint semantics over a depth-bounded ground KB.

The engine computes, over the same grounding:

* the alternating fixpoint partition: P and N sequences produced by the
  reduct transformations (drop rules blocked by the guess, strip the
  negative body, additionally drop rules whose head is refuted by the
  objective knowledge) and the least fixpoint of the positive-program
  consequence operator;

* the iterated fixpoint: an outer operator mapping a three-valued
  interpretation to the least fixpoint of the true-side inner operator
  paired with the greatest fixpoint of the false-side inner operator.

For function-free KBs the two coincide up to a complement, which the
differential checker :func:`compare_semantics` verifies instance by
instance.

Inner iterations are set-at-a-time; order independence follows from the
monotonicity of the operators.  Should the objective knowledge become
inconsistent during iteration, entailment explodes classically and a
diagnostic is recorded.  A contradictory state (true and false sets
overlapping, or P escaping N) stops the computation with an incoherence
error instead of returning a partial answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .diagnostics import Diagnostic, Severity
from .dl import DLContext
from .errors import IncoherenceError, UnknownAtomError
from .grounding import (
    DEFAULT_MAX_GROUND_RULES,
    GroundProgram,
    KnownAtoms,
    ground_program,
)
from .model import (
    Atom,
    HybridKB,
    Interpretation,
    Partition,
    Rule,
    TruthValue,
    format_atom_set,
    sort_atoms,
)


@dataclass
class GroundContext:
    """A KB grounded at a fixed depth bound, ready for fixpoint runs.

    Shared and immutable apart from the DL caches and the diagnostics
    list, which only ever grows.
    """

    kb: HybridKB
    depth_bound: int
    program: GroundProgram
    known: KnownAtoms
    dl: DLContext
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @cached_property
    def ka(self) -> frozenset[Atom]:
        return self.known.atom_set

    @cached_property
    def rules_by_head(self) -> dict[Atom, tuple[Rule, ...]]:
        index: dict[Atom, list[Rule]] = {}
        for rule in self.program.rules:
            index.setdefault(rule.head, []).append(rule)
        return {head: tuple(rules) for head, rules in index.items()}

    @cached_property
    def non_dl_ka(self) -> frozenset[Atom]:
        return frozenset(a for a in self.ka if not self.dl.is_dl_atom(a))

    @cached_property
    def dl_ka(self) -> tuple[Atom, ...]:
        return sort_atoms(a for a in self.ka if self.dl.is_dl_atom(a))

    def note_inconsistency(self, where: str) -> None:
        # One diagnostic per context keeps output deterministic and terse.
        if not any(d.code == "ob-inconsistent" for d in self.diagnostics):
            self.diagnostics.append(
                Diagnostic(
                    Severity.WARNING,
                    "ob-inconsistent",
                    "objective knowledge became inconsistent during "
                    f"{where}; classical explosion applied",
                )
            )


def ground_context(
    kb: HybridKB,
    depth_bound: int,
    max_rules: int = DEFAULT_MAX_GROUND_RULES,
) -> GroundContext:
    program, known = ground_program(kb, depth_bound, max_rules)
    return GroundContext(kb, depth_bound, program, known, DLContext.for_kb(kb))


@dataclass(frozen=True)
class PositiveGroundKB:
    """Ground rules without negative literals, over a shared context."""

    context: GroundContext
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        assert all(not r.negative_body for r in self.rules)


# ---------------------------------------------------------------------------
# Positive-program consequences
# ---------------------------------------------------------------------------


def rk(kb: PositiveGroundKB, atoms: frozenset[Atom]) -> frozenset[Atom]:
    """Immediate rule consequences: heads whose bodies hold in ``atoms``."""
    return frozenset(
        rule.head
        for rule in kb.rules
        if all(a in atoms for a in rule.positive_body)
    )


def dk(kb: PositiveGroundKB, atoms: frozenset[Atom]) -> frozenset[Atom]:
    """Known atoms entailed by the objective knowledge for ``atoms``."""
    return _entailed_known_atoms(kb.context, atoms, where="positive consequences")


def _entailed_known_atoms(
    ctx: GroundContext, atoms: frozenset[Atom], where: str
) -> frozenset[Atom]:
    if not ctx.dl.satisfiable(atoms):
        ctx.note_inconsistency(where)
        return ctx.ka
    entailed = atoms & ctx.non_dl_ka
    dl_entailed = frozenset(
        a for a in ctx.dl_ka if ctx.dl.entails_atom(atoms, a)
    )
    return entailed | dl_entailed


def lfp_tk(kb: PositiveGroundKB) -> frozenset[Atom]:
    """Least fixpoint of the consequence operator, iterated from empty."""
    current: frozenset[Atom] = frozenset()
    while True:
        step = rk(kb, current) | dk(kb, current)
        if step == current:
            return current
        current = step


# ---------------------------------------------------------------------------
# Reduct transformations
# ---------------------------------------------------------------------------


def mknf_transform(ctx: GroundContext, guess: frozenset[Atom]) -> PositiveGroundKB:
    """Keep rules whose negative body avoids ``guess``; strip the negatives."""
    kept = tuple(
        Rule(rule.head, rule.positive_body)
        for rule in ctx.program.rules
        if not any(b in guess for b in rule.negative_body)
    )
    return PositiveGroundKB(ctx, kept)


def mknf_coherent_transform(
    ctx: GroundContext, guess: frozenset[Atom]
) -> PositiveGroundKB:
    """As :func:`mknf_transform`, also dropping rules with refuted heads.

    A head is refuted when the objective knowledge for ``guess`` entails
    its negation.
    """
    if not ctx.dl.satisfiable(guess):
        ctx.note_inconsistency("the coherent reduct")
    kept = tuple(
        Rule(rule.head, rule.positive_body)
        for rule in ctx.program.rules
        if not any(b in guess for b in rule.negative_body)
        and not ctx.dl.entails_negated_atom(guess, rule.head)
    )
    return PositiveGroundKB(ctx, kept)


def gamma(ctx: GroundContext, guess: frozenset[Atom]) -> frozenset[Atom]:
    return lfp_tk(mknf_transform(ctx, guess))


def gamma_prime(ctx: GroundContext, guess: frozenset[Atom]) -> frozenset[Atom]:
    return lfp_tk(mknf_coherent_transform(ctx, guess))


# ---------------------------------------------------------------------------
# Alternating fixpoint partition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AFPTrace:
    """The P (increasing) and N (decreasing) sequences up to stabilization."""

    p_seq: tuple[frozenset[Atom], ...]
    n_seq: tuple[frozenset[Atom], ...]

    @property
    def p_omega(self) -> frozenset[Atom]:
        return self.p_seq[-1]

    @property
    def n_omega(self) -> frozenset[Atom]:
        return self.n_seq[-1]

    @property
    def steps(self) -> int:
        return len(self.p_seq) - 1


def afp_trace(ctx: GroundContext) -> AFPTrace:
    """Run the alternating iteration to stabilization, no coherence check."""
    p: frozenset[Atom] = frozenset()
    n: frozenset[Atom] = ctx.ka
    p_seq = [p]
    n_seq = [n]
    while True:
        p_next = gamma(ctx, n)
        n_next = gamma_prime(ctx, p)
        p_seq.append(p_next)
        n_seq.append(n_next)
        if p_next == p and n_next == n:
            return AFPTrace(tuple(p_seq), tuple(n_seq))
        p, n = p_next, n_next


def alternating_fixpoint_partition(
    ctx: GroundContext,
) -> tuple[AFPTrace, Partition]:
    """The limit partition; raises if P escapes N (incoherent KB)."""
    trace = afp_trace(ctx)
    if not trace.p_omega <= trace.n_omega:
        raise IncoherenceError(
            "alternating fixpoint has P not included in N; witness atoms "
            + format_atom_set(trace.p_omega - trace.n_omega)
        )
    return trace, Partition(trace.p_omega, trace.n_omega)


# ---------------------------------------------------------------------------
# Inner operators of the iterated fixpoint
# ---------------------------------------------------------------------------


def op_true(
    ctx: GroundContext, interp: Interpretation, tr: frozenset[Atom]
) -> frozenset[Atom]:
    """Atoms derivable as true given the interpretation and ``tr``.

    A rule contributes its head when every positive body atom is true in
    the interpretation or in ``tr`` and every negative body atom is false
    in the interpretation; the objective knowledge for the true atoms
    plus ``tr`` contributes everything it entails.
    """
    support = interp.true_atoms | tr
    derived = set()
    for rule in ctx.program.rules:
        if all(a in support for a in rule.positive_body) and all(
            b in interp.false_atoms for b in rule.negative_body
        ):
            derived.add(rule.head)
    return frozenset(derived) | _entailed_known_atoms(
        ctx, support, where="the true-side operator"
    )


def op_false(
    ctx: GroundContext, interp: Interpretation, fa: frozenset[Atom]
) -> frozenset[Atom]:
    """Atoms derivable as false given the interpretation and ``fa``.

    An atom qualifies when its negation follows from the objective
    knowledge for the true atoms, or every rule with that head is blocked
    (some positive body atom false in the interpretation or in ``fa``, or
    some negative body atom true in the interpretation); and additionally
    the objective knowledge for all not-yet-false atoms does not entail it.
    """
    blocked_support = interp.false_atoms | fa
    candidates = set()
    for atom in ctx.ka:
        if ctx.dl.entails_negated_atom(interp.true_atoms, atom):
            candidates.add(atom)
            continue
        rules = ctx.rules_by_head.get(atom, ())
        if all(
            any(a in blocked_support for a in rule.positive_body)
            or any(b in interp.true_atoms for b in rule.negative_body)
            for rule in rules
        ):
            candidates.add(atom)
    remaining = ctx.ka - (interp.false_atoms | fa)
    entailed = _entailed_known_atoms(ctx, remaining, where="the false-side operator")
    return frozenset(candidates) - entailed


def lfp_op_true_steps(
    ctx: GroundContext, interp: Interpretation
) -> tuple[frozenset[Atom], tuple[frozenset[Atom], ...]]:
    """Least fixpoint from empty, plus the per-step additions."""
    current: frozenset[Atom] = frozenset()
    additions: list[frozenset[Atom]] = []
    while True:
        step = op_true(ctx, interp, current)
        if step == current:
            return current, tuple(additions)
        additions.append(frozenset(step - current))
        current = step


def gfp_op_false_steps(
    ctx: GroundContext, interp: Interpretation
) -> tuple[frozenset[Atom], tuple[frozenset[Atom], ...]]:
    """Greatest fixpoint from all known atoms, plus per-step removals."""
    current = ctx.ka
    removals: list[frozenset[Atom]] = []
    while True:
        step = op_false(ctx, interp, current)
        if step == current:
            return current, tuple(removals)
        removals.append(frozenset(current - step))
        current = step


def lfp_op_true(ctx: GroundContext, interp: Interpretation) -> frozenset[Atom]:
    return lfp_op_true_steps(ctx, interp)[0]


def gfp_op_false(ctx: GroundContext, interp: Interpretation) -> frozenset[Atom]:
    return gfp_op_false_steps(ctx, interp)[0]


# ---------------------------------------------------------------------------
# Iterated fixpoint
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IFPTrace:
    """Outer interpretation sequence with the inner iteration logs.

    ``optrue_steps[n]`` and ``opfalse_steps[n]`` log the inner additions
    and removals that produced ``interpretations[n + 1]``.
    """

    interpretations: tuple[Interpretation, ...]
    optrue_steps: tuple[tuple[frozenset[Atom], ...], ...]
    opfalse_steps: tuple[tuple[frozenset[Atom], ...], ...]

    @property
    def fixpoint(self) -> Interpretation:
        return self.interpretations[-1]

    @property
    def outer_steps(self) -> int:
        return len(self.interpretations) - 1


def iterated_fixpoint(ctx: GroundContext) -> tuple[IFPTrace, Interpretation]:
    """Iterate the outer operator from the empty interpretation.

    Raises :class:`IncoherenceError` when a stage derives some atom both
    true and false.
    """
    interp = Interpretation()
    interps = [interp]
    true_logs: list[tuple[frozenset[Atom], ...]] = []
    false_logs: list[tuple[frozenset[Atom], ...]] = []
    while True:
        true_set, true_steps = lfp_op_true_steps(ctx, interp)
        false_set, false_steps = gfp_op_false_steps(ctx, interp)
        overlap = true_set & false_set
        if overlap:
            raise IncoherenceError(
                "iterated fixpoint derived atoms both true and false: "
                + format_atom_set(overlap)
            )
        step = Interpretation(true_set, false_set)
        interps.append(step)
        true_logs.append(true_steps)
        false_logs.append(false_steps)
        if step == interp:
            trace = IFPTrace(tuple(interps), tuple(true_logs), tuple(false_logs))
            return trace, step
        interp = step


def query_context(ctx: GroundContext, atom: Atom) -> TruthValue:
    if atom not in ctx.ka:
        raise UnknownAtomError(atom, ctx.depth_bound)
    _, interp = iterated_fixpoint(ctx)
    return interp.truth_of(atom)


def query(
    kb: HybridKB,
    atom: Atom,
    depth_bound: int,
    max_rules: int = DEFAULT_MAX_GROUND_RULES,
) -> TruthValue:
    """Ground at the given bound and classify the atom (true/undefined/false)."""
    return query_context(ground_context(kb, depth_bound, max_rules), atom)


# ---------------------------------------------------------------------------
# Differential check between the two semantics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompareReport:
    """Outcome of checking the iterated fixpoint against the partition."""

    true_side_match: bool
    nonfalse_side_match: bool
    only_ifp_true: tuple[Atom, ...]
    only_afp_true: tuple[Atom, ...]
    only_ifp_nonfalse: tuple[Atom, ...]
    only_afp_nonfalse: tuple[Atom, ...]

    @property
    def matched(self) -> bool:
        return self.true_side_match and self.nonfalse_side_match


def compare_semantics(ctx: GroundContext) -> CompareReport:
    """Check that the iterated fixpoint equals the alternating partition.

    Only meaningful for function-free KBs, whose grounding is exact.
    """
    if not ctx.kb.is_function_free:
        raise ValueError("semantics comparison requires a function-free KB")
    _, interp = iterated_fixpoint(ctx)
    trace = afp_trace(ctx)
    ifp_true = interp.true_atoms
    ifp_nonfalse = ctx.ka - interp.false_atoms
    return CompareReport(
        true_side_match=ifp_true == trace.p_omega,
        nonfalse_side_match=ifp_nonfalse == trace.n_omega,
        only_ifp_true=sort_atoms(ifp_true - trace.p_omega),
        only_afp_true=sort_atoms(trace.p_omega - ifp_true),
        only_ifp_nonfalse=sort_atoms(ifp_nonfalse - trace.n_omega),
        only_afp_nonfalse=sort_atoms(trace.n_omega - ifp_nonfalse),
    )
