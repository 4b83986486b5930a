import pytest

from hkbfs.engine import (
    afp_trace,
    alternating_fixpoint_partition,
    compare_semantics,
    dk,
    gamma,
    gfp_op_false,
    ground_context,
    iterated_fixpoint,
    lfp_op_true,
    lfp_tk,
    mknf_coherent_transform,
    mknf_transform,
    op_false,
    op_true,
    query,
    rk,
)
from hkbfs.errors import IncoherenceError, UnknownAtomError
from hkbfs.model import Atom, Interpretation, Term, TruthValue
from hkbfs.oracle import enumerate_stable_partitions
from hkbfs.parser import parse_ground_atom, parse_kb

T = Term("t")
ZERO = Term("0")


def s(x):
    return Term("s", (x,))


def atom(p, *args):
    return Atom(p, tuple(args))


def atoms(*texts):
    return frozenset(parse_ground_atom(t) for t in texts)


@pytest.fixture()
def tiny_ctx(tiny_kb):
    return ground_context(tiny_kb, 0)


# -- positive consequences ----------------------------------------------------


def test_rk_unmet_body():
    ctx = ground_context(parse_kb("a :- b."), 0)
    pos = mknf_transform(ctx, frozenset())
    assert rk(pos, frozenset()) == frozenset()


def test_rk_direct_firing():
    ctx = ground_context(parse_kb("a :- b."), 0)
    pos = mknf_transform(ctx, frozenset())
    assert rk(pos, atoms("b")) == atoms("a")


def test_rk_spillover_step(spillover_ctx):
    pos = mknf_transform(spillover_ctx, spillover_ctx.ka)
    derived = rk(pos, atoms("virus(t)", "mutated(t)", "sc(t,0)"))
    assert parse_ground_atom("sc(t,s(0))") in derived


def test_dk_without_ontology_is_membership():
    ctx = ground_context(parse_kb("p :- q. r."), 0)
    pos = mknf_transform(ctx, frozenset())
    assert dk(pos, atoms("q")) == atoms("q")
    assert dk(pos, atoms("q", "r")) == atoms("q", "r")


def test_dk_spillover_derives_mutated(spillover_ctx):
    pos = mknf_transform(spillover_ctx, frozenset())
    assert parse_ground_atom("mutated(t)") in dk(pos, atoms("virus(t)"))


def test_dk_via_subclass_axiom():
    kb = parse_kb(
        """
        #program.
        h(X) :- q(X), b(X).
        q(c).
        a(c).
        #ontology.
        a subClassOf b.
        """
    )
    ctx = ground_context(kb, 0)
    pos = mknf_transform(ctx, frozenset())
    assert atom("b", Term("c")) in dk(pos, frozenset({atom("a", Term("c"))}))


def test_lfp_tk_empty():
    ctx = ground_context(parse_kb(""), 0)
    assert lfp_tk(mknf_transform(ctx, frozenset())) == frozenset()


def test_lfp_tk_two_step_closure():
    ctx = ground_context(parse_kb("p. q :- p."), 0)
    assert lfp_tk(mknf_transform(ctx, frozenset())) == atoms("p", "q")


def test_lfp_tk_spillover_reaches_first_true_stage(spillover_ctx):
    result = lfp_tk(mknf_transform(spillover_ctx, spillover_ctx.ka))
    assert result == atoms(
        "virus(t)", "mutated(t)", "sc(t,0)", "sc(t,s(0))", "sc(t,s(s(0)))",
        "sc(t,s(s(s(0))))",
    )


# -- transformations -----------------------------------------------------------


def test_transform_blocked_rule_removed():
    ctx = ground_context(parse_kb("p :- not q."), 0)
    assert mknf_transform(ctx, atoms("q")).rules == ()


def test_transform_keeps_rule_and_strips_negatives():
    ctx = ground_context(parse_kb("p :- not q."), 0)
    kept = mknf_transform(ctx, frozenset()).rules
    assert len(kept) == 1
    assert kept[0].head == atom("p")
    assert kept[0].positive_body == () and kept[0].negative_body == ()


def test_transform_spillover_removes_safe_rule(spillover_ctx):
    pos = mknf_transform(spillover_ctx, spillover_ctx.ka)
    assert all(rule.head != atom("safe", T) for rule in pos.rules)


def test_coherent_transform_without_ontology_matches_plain():
    ctx = ground_context(parse_kb("p :- not q. r :- p."), 0)
    for guess in (frozenset(), atoms("q"), atoms("p", "q")):
        assert (
            mknf_coherent_transform(ctx, guess).rules
            == mknf_transform(ctx, guess).rules
        )


def test_coherent_transform_drops_refuted_head():
    kb = parse_kb(
        """
        #program.
        a2(c).
        a1(c).
        #ontology.
        a1 subClassOf not a2.
        """
    )
    ctx = ground_context(kb, 0)
    kept = mknf_coherent_transform(ctx, frozenset({atom("a1", Term("c"))})).rules
    assert [r.head for r in kept] == [atom("a1", Term("c"))]


def test_coherent_transform_spillover_head_filter_is_noop(spillover_ctx):
    # The ontology derives no negated atoms, so the extra head condition
    # never fires; only the ordinary reduct filtering applies.
    p1 = lfp_tk(mknf_transform(spillover_ctx, spillover_ctx.ka))
    assert (
        mknf_coherent_transform(spillover_ctx, p1).rules
        == mknf_transform(spillover_ctx, p1).rules
    )


# -- gamma and the alternating partition ---------------------------------------


def test_gamma_reduct_fact():
    ctx = ground_context(parse_kb("p :- not q."), 0)
    assert gamma(ctx, frozenset()) == atoms("p")
    assert gamma(ctx, atoms("q")) == frozenset()


def test_gamma_spillover_first_stage(spillover_ctx):
    assert gamma(spillover_ctx, spillover_ctx.ka) == atoms(
        "virus(t)", "mutated(t)", "sc(t,0)", "sc(t,s(0))", "sc(t,s(s(0)))",
        "sc(t,s(s(s(0))))",
    )


def test_afp_tiny(tiny_ctx):
    trace, partition = alternating_fixpoint_partition(tiny_ctx)
    assert partition.p == atoms("p")
    assert partition.n == atoms("p")
    # confirmed by the stable-partition oracle
    assert [(p.p, p.n) for p in enumerate_stable_partitions(tiny_ctx)] == [
        (atoms("p"), atoms("p"))
    ]


def test_afp_empty_kb():
    ctx = ground_context(parse_kb(""), 0)
    _, partition = alternating_fixpoint_partition(ctx)
    assert partition.p == frozenset() and partition.n == frozenset()


def test_afp_self_blocking_rule():
    ctx = ground_context(parse_kb("p :- not p."), 0)
    trace, partition = alternating_fixpoint_partition(ctx)
    assert partition.p == frozenset()
    assert partition.n == atoms("p")
    assert [(q.p, q.n) for q in enumerate_stable_partitions(ctx)] == [
        (frozenset(), atoms("p"))
    ]


def test_afp_sequences_monotone(spillover_ctx):
    trace = afp_trace(spillover_ctx)
    for earlier, later in zip(trace.p_seq, trace.p_seq[1:]):
        assert earlier <= later
    for earlier, later in zip(trace.n_seq, trace.n_seq[1:]):
        assert later <= earlier
    assert trace.p_omega <= trace.n_omega
    assert trace.steps <= len(spillover_ctx.ka) + 1


def test_afp_incoherent_kb_raises():
    kb = parse_kb(
        """
        #program.
        a1(c) :- not q(c).
        q(c) :- r(c).
        #ontology.
        a1 subClassOf bot.
        """
    )
    ctx = ground_context(kb, 0)
    with pytest.raises(IncoherenceError):
        alternating_fixpoint_partition(ctx)


# -- inner operators ------------------------------------------------------------


def test_op_true_first_step_spillover(spillover_ctx):
    empty = Interpretation()
    assert op_true(spillover_ctx, empty, frozenset()) == atoms(
        "virus(t)", "mutated(t)"
    )


def test_op_true_third_step_spillover(spillover_ctx):
    empty = Interpretation()
    tr = atoms("virus(t)", "mutated(t)", "sc(t,0)")
    result = op_true(spillover_ctx, empty, tr)
    assert parse_ground_atom("sc(t,s(0))") in result


def test_op_true_empty_program():
    ctx = ground_context(parse_kb(""), 0)
    assert op_true(ctx, Interpretation(), frozenset()) == frozenset()


def test_op_false_first_step_spillover(spillover_ctx):
    empty = Interpretation()
    after = op_false(spillover_ctx, empty, spillover_ctx.ka)
    removed = spillover_ctx.ka - after
    assert removed == atoms("virus(t)", "mutated(t)", "safe(t)")


def test_op_false_keeps_safe_at_stage_two(spillover_ctx):
    trace, _ = iterated_fixpoint(spillover_ctx)
    stage1 = trace.interpretations[1]
    after = op_false(spillover_ctx, stage1, spillover_ctx.ka)
    removed = spillover_ctx.ka - after
    assert removed == atoms("virus(t)", "mutated(t)")
    assert atom("safe", T) in after


def test_facts_are_never_false():
    ctx = ground_context(parse_kb("p."), 0)
    assert op_false(ctx, Interpretation(), frozenset()) == frozenset()


def test_inner_fixpoints_spillover(spillover_ctx):
    empty = Interpretation()
    stage1_true = lfp_op_true(spillover_ctx, empty)
    assert stage1_true == atoms(
        "virus(t)", "mutated(t)", "sc(t,0)", "sc(t,s(0))", "sc(t,s(s(0)))",
        "sc(t,s(s(s(0))))",
    )
    trace, _ = iterated_fixpoint(spillover_ctx)
    stage1 = trace.interpretations[1]
    assert gfp_op_false(spillover_ctx, stage1) == spillover_ctx.ka - stage1_true


def test_inner_fixpoints_empty_kb():
    ctx = ground_context(parse_kb(""), 0)
    empty = Interpretation()
    assert lfp_op_true(ctx, empty) == frozenset()
    assert gfp_op_false(ctx, empty) == frozenset()


# -- the iterated fixpoint -------------------------------------------------------


def test_ifp_spillover_converges_at_stage_two(spillover_ctx):
    trace, interp = iterated_fixpoint(spillover_ctx)
    stage1 = trace.interpretations[1]
    assert trace.interpretations[2] == trace.interpretations[3] == interp
    assert interp.true_atoms == stage1.true_atoms
    assert interp.false_atoms == spillover_ctx.ka - stage1.true_atoms
    assert interp.truth_of(atom("safe", T)) is TruthValue.FALSE


def test_ifp_tiny(tiny_ctx):
    _, interp = iterated_fixpoint(tiny_ctx)
    assert interp.true_atoms == atoms("p")
    assert interp.false_atoms == atoms("q")


def test_ifp_empty_kb():
    ctx = ground_context(parse_kb(""), 0)
    _, interp = iterated_fixpoint(ctx)
    assert interp == Interpretation()


def test_ifp_outer_sequence_increasing(spillover_ctx):
    trace, _ = iterated_fixpoint(spillover_ctx)
    for earlier, later in zip(trace.interpretations, trace.interpretations[1:]):
        assert earlier.leq(later)
    assert trace.outer_steps <= len(spillover_ctx.ka) + 1


def test_ifp_incoherent_kb_raises():
    kb = parse_kb(
        """
        #program.
        a1(c).
        #ontology.
        a1 subClassOf bot.
        """
    )
    ctx = ground_context(kb, 0)
    with pytest.raises(IncoherenceError):
        iterated_fixpoint(ctx)
    assert any(d.code == "ob-inconsistent" for d in ctx.diagnostics)


# -- query ------------------------------------------------------------------------


def test_query_spillover(spillover_kb):
    assert query(spillover_kb, parse_ground_atom("safe(t)"), 2) is TruthValue.FALSE
    assert query(spillover_kb, parse_ground_atom("virus(t)"), 0) is TruthValue.TRUE


def test_query_undefined():
    kb = parse_kb("p :- not p.")
    assert query(kb, atom("p"), 0) is TruthValue.UNDEFINED


def test_query_unknown_atom_names_bound(spillover_kb):
    with pytest.raises(UnknownAtomError) as err:
        query(spillover_kb, parse_ground_atom("sc(t,s(s(s(s(s(0))))))"), 1)
    assert "k=1" in str(err.value)


# -- differential check -------------------------------------------------------------


def test_compare_tiny(tiny_ctx):
    assert compare_semantics(tiny_ctx).matched


def test_compare_empty():
    assert compare_semantics(ground_context(parse_kb(""), 0)).matched


def test_compare_rejects_function_symbols(spillover_ctx):
    with pytest.raises(ValueError):
        compare_semantics(spillover_ctx)


def test_compare_dl_mix(fixtures_dir):
    from hkbfs.parser import load_kb

    kb = load_kb(str(fixtures_dir / "dlmix.hkb"))
    ctx = ground_context(kb, 0)
    assert compare_semantics(ctx).matched
    _, interp = iterated_fixpoint(ctx)
    c1, c2 = Term("c1"), Term("c2")
    assert interp.truth_of(atom("q", c1)) is TruthValue.TRUE
    assert interp.truth_of(atom("p", c1)) is TruthValue.FALSE
    assert interp.truth_of(atom("p", c2)) is TruthValue.TRUE
