"""Acceptance suite: one test per shipping criterion.

Each test prints an ``ACCEPTANCE <id>: PASS`` line (FAIL before the
assertion error when a criterion is violated), so a plain ``pytest -s
tests/test_acceptance.py`` doubles as the acceptance report.
"""

import contextlib
import io
import random
import time

import pytest

from folmodels import fol_entails
from hkbfs.cli import main as cli_main
from hkbfs.dl import DLContext
from hkbfs.engine import (
    compare_semantics,
    gamma,
    gamma_prime,
    gfp_op_false_steps,
    ground_context,
    iterated_fixpoint,
    lfp_op_true_steps,
    op_false,
    op_true,
)
from hkbfs.model import (
    Atom,
    AtomicConcept,
    ConceptAssertion,
    Exists,
    Forall,
    Interpretation,
    Not,
    Partition,
    RoleAssertion,
    SubClassOf,
    Term,
    TruthValue,
)
from hkbfs.oracle import (
    KBLimits,
    check_coherence,
    enumerate_stable_partitions,
    is_stable_partition,
    random_kb,
)
from hkbfs.parser import load_kb, parse_ground_atom

CORPUS_LIMITS = KBLimits(max_constants=6, max_predicates=4, max_rules=8, max_axioms=4)
CORPUS_SEEDS = range(1, 501)


@contextlib.contextmanager
def criterion(label):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {label}: FAIL")
        raise
    print(f"ACCEPTANCE {label}: PASS")


def atoms(*texts):
    return frozenset(parse_ground_atom(t) for t in texts)


def test_c1_spillover_reproduction(fixtures_dir):
    with criterion("C1 spillover-reproduction"):
        started = time.monotonic()
        kb = load_kb(str(fixtures_dir / "spillover.hkb"))
        ctx = ground_context(kb, 2)
        trace, interp = iterated_fixpoint(ctx)

        stage1 = trace.interpretations[1]
        expected_depth2 = atoms(
            "virus(t)", "mutated(t)", "sc(t,0)", "sc(t,s(0))", "sc(t,s(s(0)))"
        )
        assert frozenset(
            a for a in stage1.true_atoms if a.depth <= 2
        ) == expected_depth2

        safe = atoms("safe(t)")
        assert stage1.false_atoms == ctx.ka - stage1.true_atoms - safe

        stage2 = trace.interpretations[2]
        assert stage2.false_atoms == ctx.ka - stage1.true_atoms
        assert interp.truth_of(parse_ground_atom("safe(t)")) is TruthValue.FALSE

        # fixpoint at outer step 2: the third application only confirms
        assert trace.interpretations[3] == trace.interpretations[2]
        assert trace.outer_steps == 3

        elapsed = time.monotonic() - started
        assert elapsed < 1.0, f"took {elapsed:.2f}s"


def test_c2_theorem_differential_suite():
    with criterion("C2 alternating-vs-iterated differential (500 KBs)"):
        started = time.monotonic()
        excluded = matched = 0
        for seed in CORPUS_SEEDS:
            kb = random_kb(seed, CORPUS_LIMITS)
            ctx = ground_context(kb, 0)
            if not check_coherence(ctx).coherent:
                excluded += 1
                continue
            report = compare_semantics(ctx)
            assert report.matched, (
                f"seed {seed}: IFP/AFP disagree "
                f"(+T {report.only_ifp_true} -T {report.only_afp_true} "
                f"+N {report.only_ifp_nonfalse} -N {report.only_afp_nonfalse})"
            )
            matched += 1
        elapsed = time.monotonic() - started
        assert matched + excluded == len(CORPUS_SEEDS)
        assert excluded / len(CORPUS_SEEDS) < 0.20, f"excluded {excluded}"
        assert elapsed < 60.0, f"took {elapsed:.1f}s"
        print(
            f"  [C2] matched={matched} excluded={excluded} "
            f"({elapsed:.1f}s)"
        )


def test_c3_stable_partition_oracle_agreement():
    with criterion("C3 stable-partition oracle agreement (|ka| <= 10)"):
        eligible = confirmed = exact_checked = 0
        for seed in CORPUS_SEEDS:
            kb = random_kb(seed, CORPUS_LIMITS)
            ctx = ground_context(kb, 0)
            if len(ctx.ka) > 10:
                continue
            eligible += 1
            report = check_coherence(ctx, stable_guard=10)
            if report.coherent:
                stability = is_stable_partition(
                    ctx, Partition(report.p_omega, report.n_omega)
                )
                assert stability.passed, f"seed {seed}: {stability.detail}"
                confirmed += 1
            for part in enumerate_stable_partitions(ctx, max_atoms=10):
                if part.is_exact:
                    e = part.p
                    assert gamma(ctx, e) == e, f"seed {seed}: {part}"
                    assert gamma_prime(ctx, e) == e, f"seed {seed}: {part}"
                    exact_checked += 1
        assert eligible >= 100 and confirmed >= 100 and exact_checked >= 100
        print(
            f"  [C3] eligible={eligible} fixpoints-confirmed={confirmed} "
            f"exact-partitions-checked={exact_checked}"
        )


def _random_interpretation(rng, ka):
    true_atoms, false_atoms = set(), set()
    for atom in sorted(ka, key=lambda a: a.sort_key()):
        roll = rng.random()
        if roll < 0.3:
            true_atoms.add(atom)
        elif roll < 0.6:
            false_atoms.add(atom)
    return Interpretation(frozenset(true_atoms), frozenset(false_atoms))


def _shrink(rng, interp):
    return Interpretation(
        frozenset(a for a in interp.true_atoms if rng.random() < 0.6),
        frozenset(a for a in interp.false_atoms if rng.random() < 0.6),
    )


def _subset(rng, ka, bias=0.4):
    return frozenset(
        a for a in sorted(ka, key=lambda a: a.sort_key()) if rng.random() < bias
    )


@pytest.fixture(scope="module")
def monotonicity_contexts():
    return [
        ground_context(random_kb(seed, KBLimits(3, 3, 5, 2)), 0)
        for seed in range(1, 121)
    ]


def test_c4_argument_monotonicity(monotonicity_contexts):
    with criterion("C4a inner-operator argument monotonicity (1000 trials)"):
        rng = random.Random(42)
        for trial in range(1000):
            ctx = monotonicity_contexts[trial % len(monotonicity_contexts)]
            interp = _random_interpretation(rng, ctx.ka)
            small = _subset(rng, ctx.ka)
            big = small | _subset(rng, ctx.ka)
            assert op_true(ctx, interp, small) <= op_true(ctx, interp, big)
            assert op_false(ctx, interp, small) <= op_false(ctx, interp, big)


def test_c4_interpretation_monotonicity(monotonicity_contexts):
    with criterion("C4b inner-operator interpretation monotonicity (1000 trials)"):
        rng = random.Random(43)
        for trial in range(1000):
            ctx = monotonicity_contexts[trial % len(monotonicity_contexts)]
            bigger = _random_interpretation(rng, ctx.ka)
            smaller = _shrink(rng, bigger)
            argument = _subset(rng, ctx.ka)
            assert op_true(ctx, smaller, argument) <= op_true(ctx, bigger, argument)
            assert op_false(ctx, smaller, argument) <= op_false(ctx, bigger, argument)


def test_c4_outer_operator_monotonicity(monotonicity_contexts):
    with criterion("C4c outer-operator monotonicity (1000 trials)"):
        rng = random.Random(44)
        for trial in range(1000):
            ctx = monotonicity_contexts[trial % len(monotonicity_contexts)]
            bigger = _random_interpretation(rng, ctx.ka)
            smaller = _shrink(rng, bigger)
            t_small, _ = lfp_op_true_steps(ctx, smaller)
            t_big, _ = lfp_op_true_steps(ctx, bigger)
            f_small, _ = gfp_op_false_steps(ctx, smaller)
            f_big, _ = gfp_op_false_steps(ctx, bigger)
            assert t_small <= t_big and f_small <= f_big


def _dl_scenario(seed):
    rng = random.Random(seed)
    a, b = AtomicConcept("a1"), AtomicConcept("a2")
    inds = [Term("c1"), Term("c2")]
    literals = [a, b, Not(a), Not(b)]

    def literal():
        return rng.choice(literals)

    axioms = []
    for _ in range(rng.randint(0, 3)):
        shape = rng.choices(
            ("sub", "exists-rhs", "forall-rhs", "exists-lhs"),
            weights=(6, 2, 2, 1),
        )[0]
        if shape == "sub":
            axioms.append(SubClassOf(literal(), literal()))
        elif shape == "exists-rhs":
            axioms.append(SubClassOf(literal(), Exists("r1", literal())))
        elif shape == "forall-rhs":
            axioms.append(SubClassOf(literal(), Forall("r1", literal())))
        else:
            axioms.append(SubClassOf(Exists("r1", literal()), literal()))
    if rng.random() < 0.5:
        axioms.append(ConceptAssertion(rng.choice(inds), literal()))
    if rng.random() < 0.3:
        axioms.append(RoleAssertion(rng.choice(inds), rng.choice(inds), "r1"))
    facts = set()
    for _ in range(rng.randint(0, 3)):
        if rng.random() < 0.7:
            facts.add(Atom(rng.choice(("a1", "a2")), (rng.choice(inds),)))
        else:
            facts.add(Atom("r1", (rng.choice(inds), rng.choice(inds))))
    queries = [
        Atom(rng.choice(("a1", "a2")), (rng.choice(inds),))
        if rng.random() < 0.8
        else Atom("r1", (rng.choice(inds), rng.choice(inds)))
        for _ in range(4)
    ]
    return axioms, frozenset(facts), queries


def test_c5_dl_soundness_against_model_enumeration():
    with criterion("C5 tableau vs interpretation enumeration (200 queries)"):
        checked = 0
        seed = 0
        while checked < 200:
            seed += 1
            axioms, facts, queries = _dl_scenario(seed)
            ctx = DLContext(
                tuple(axioms), frozenset(("a1", "a2")), frozenset(("r1",))
            )
            ordered = sorted(facts, key=lambda x: x.sort_key())
            for query in queries:
                expected = fol_entails(axioms, ordered, query, max_domain=3)
                assert ctx.entails_atom(facts, query) == expected, (
                    f"seed {seed}, query {query}"
                )
                checked += 1
        print(f"  [C5] queries checked: {checked}")


FIXTURE_NAMES = ("spillover.hkb", "tiny.hkb", "undefined.hkb", "dlmix.hkb")
COMMANDS = ("query", "partition", "trace", "compare", "check-coherence", "validate")


def _run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_c6_cli_determinism(fixtures_dir):
    with criterion("C6 byte-identical CLI output"):
        runs = 0
        kb_files = [fixtures_dir / name for name in FIXTURE_NAMES]
        kb_files += sorted((fixtures_dir / "corpus").glob("*.hkb"))
        query_atoms = {
            "tiny.hkb": "p",
            "undefined.hkb": "p",
            "dlmix.hkb": "p(c1)",
            "spillover.hkb": "virus(t)",
        }
        for kb_file in kb_files:
            for command in COMMANDS:
                for fmt in ("text", "structured"):
                    argv = [command, "--kb", str(kb_file),
                            "--depth", "2", "--format", fmt]
                    if command == "query":
                        if kb_file.name not in query_atoms:
                            continue
                        argv += ["--atom", query_atoms[kb_file.name]]
                    first = _run_cli(argv)
                    second = _run_cli(argv)
                    assert first == second, (kb_file.name, command, fmt)
                    runs += 1
        print(f"  [C6] command runs compared: {runs}")


def test_c7_depth_monotonicity(fixtures_dir):
    with criterion("C7 truncation-depth sanity on the spillover fixture"):
        kb = load_kb(str(fixtures_dir / "spillover.hkb"))
        results = {}
        for k in (2, 3, 4, 5):
            ctx = ground_context(kb, k)
            _, interp = iterated_fixpoint(ctx)
            results[k] = interp
        for k in (2, 3, 4):
            shallow = frozenset(
                a for a in results[k].true_atoms if a.depth <= k - 1
            )
            assert shallow <= results[k + 1].true_atoms
        for probe, expected in (
            ("virus(t)", TruthValue.TRUE),
            ("mutated(t)", TruthValue.TRUE),
            ("safe(t)", TruthValue.FALSE),
        ):
            atom = parse_ground_atom(probe)
            for k in (2, 3, 4):
                assert results[k].truth_of(atom) is expected, (probe, k)
