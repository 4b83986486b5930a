"""Randomized property checks for the operators and the data model.

The monotonicity suites mirror the acceptance criteria at a smaller
trial count so they stay fast in the default run; the acceptance module
runs the full-sized versions.
"""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from hkbfs.engine import (
    ground_context,
    iterated_fixpoint,
    lfp_op_true_steps,
    gfp_op_false_steps,
    op_false,
    op_true,
)
from hkbfs.errors import IncoherenceError
from hkbfs.model import Interpretation, Term, term_depth
from hkbfs.oracle import KBLimits, random_kb


def make_context(seed):
    return ground_context(random_kb(seed, KBLimits(3, 3, 5, 2)), 0)


def random_interpretation(rng, ka):
    true_atoms, false_atoms = set(), set()
    for atom in sorted(ka, key=lambda a: a.sort_key()):
        roll = rng.random()
        if roll < 0.3:
            true_atoms.add(atom)
        elif roll < 0.6:
            false_atoms.add(atom)
    return Interpretation(frozenset(true_atoms), frozenset(false_atoms))


def shrink_interpretation(rng, interp):
    keep_t = frozenset(a for a in interp.true_atoms if rng.random() < 0.6)
    keep_f = frozenset(a for a in interp.false_atoms if rng.random() < 0.6)
    return Interpretation(keep_t, keep_f)


def random_subset(rng, ka, bias=0.4):
    return frozenset(a for a in sorted(ka, key=lambda a: a.sort_key())
                     if rng.random() < bias)


def test_op_true_monotone_in_argument():
    rng = random.Random(101)
    for trial in range(150):
        ctx = make_context(rng.randint(1, 400))
        interp = random_interpretation(rng, ctx.ka)
        small = random_subset(rng, ctx.ka)
        big = small | random_subset(rng, ctx.ka)
        assert op_true(ctx, interp, small) <= op_true(ctx, interp, big)


def test_op_false_monotone_in_argument():
    rng = random.Random(102)
    for trial in range(150):
        ctx = make_context(rng.randint(1, 400))
        interp = random_interpretation(rng, ctx.ka)
        small = random_subset(rng, ctx.ka)
        big = small | random_subset(rng, ctx.ka)
        assert op_false(ctx, interp, small) <= op_false(ctx, interp, big)


def test_operators_monotone_in_interpretation():
    rng = random.Random(103)
    for trial in range(150):
        ctx = make_context(rng.randint(1, 400))
        bigger = random_interpretation(rng, ctx.ka)
        smaller = shrink_interpretation(rng, bigger)
        argument = random_subset(rng, ctx.ka)
        assert op_true(ctx, smaller, argument) <= op_true(ctx, bigger, argument)
        assert op_false(ctx, smaller, argument) <= op_false(ctx, bigger, argument)


def test_ifp_monotone_in_interpretation():
    rng = random.Random(104)
    for trial in range(80):
        ctx = make_context(rng.randint(1, 400))
        bigger = random_interpretation(rng, ctx.ka)
        smaller = shrink_interpretation(rng, bigger)
        t_small, _ = lfp_op_true_steps(ctx, smaller)
        t_big, _ = lfp_op_true_steps(ctx, bigger)
        f_small, _ = gfp_op_false_steps(ctx, smaller)
        f_big, _ = gfp_op_false_steps(ctx, bigger)
        assert t_small <= t_big
        assert f_small <= f_big


def test_fixpoints_reached_within_atom_count_bound():
    rng = random.Random(105)
    for trial in range(60):
        ctx = make_context(rng.randint(1, 400))
        bound = len(ctx.ka) + 1
        _, true_steps = lfp_op_true_steps(ctx, Interpretation())
        _, false_steps = gfp_op_false_steps(ctx, Interpretation())
        assert len(true_steps) <= bound
        assert len(false_steps) <= bound
        try:
            trace, _ = iterated_fixpoint(ctx)
        except IncoherenceError:
            continue
        assert trace.outer_steps <= bound
        for earlier, later in zip(trace.interpretations, trace.interpretations[1:]):
            assert earlier.leq(later)


# -- hypothesis-backed structural properties ----------------------------------

terms = st.recursive(
    st.sampled_from([Term("a"), Term("b"), Term("c0")]),
    lambda children: st.builds(
        lambda inner: Term("f", (inner,)), children
    ),
    max_leaves=4,
)


@given(terms)
def test_term_depth_consistent_with_structure(term):
    if term.args:
        assert term_depth(term) == 1 + max(term_depth(a) for a in term.args)
    else:
        assert term_depth(term) == 0


@given(terms, terms)
def test_term_order_total(t1, t2):
    k1, k2 = t1.sort_key(), t2.sort_key()
    assert (k1 == k2) == (t1 == t2)
    assert (k1 < k2) or (k2 < k1) or (k1 == k2)


@settings(max_examples=60)
@given(st.integers(min_value=1, max_value=5000))
def test_random_kb_round_trips_and_is_safe(seed):
    from hkbfs.parser import kb_to_text, parse_kb, validate_dl_safety

    kb = random_kb(seed, KBLimits(4, 3, 6, 3))
    assert parse_kb(kb_to_text(kb)) == kb
    assert validate_dl_safety(kb) == []
