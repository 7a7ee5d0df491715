import pytest

from topab.errors import BudgetExceeded, UnknownHypothesis, UnknownTheorem
from topab.groups import make_group
from topab.search import (
    FamilySpec,
    SearchTask,
    all_cocycles,
    all_groups_up_to_order,
    cocycle_class_representatives,
    instance_from_json,
    replay_witness,
    run_search,
    sample_cocycles,
    topologized_groups,
)

Z2 = make_group([2])
Z4 = make_group([4])
SMALL = FamilySpec(max_group_order=2, generators=("squares_small",))


def test_all_groups_up_to_order_counts():
    assert [g.moduli for g in all_groups_up_to_order(4)] == [
        (),
        (2,),
        (3,),
        (2, 2),
        (4,),
    ]
    assert len(all_groups_up_to_order(1)) == 1
    # recomputed by partition enumeration: 1+1+1+2+1+1+1+3
    assert len(all_groups_up_to_order(8)) == 11


def test_all_cocycles_census():
    hs = all_cocycles(Z2, Z2)
    assert len(hs) == 2
    # the two twisted groups realize Z/4 and Z/2 x Z/2
    from topab.extensions import realize_cocycle

    structures = sorted(realize_cocycle(Z2, Z2, h).G.moduli for h in hs)
    assert structures == [(2, 2), (4,)]
    triv = make_group([])
    assert len(all_cocycles(Z2, triv)) == 1
    assert len(all_cocycles(triv, Z2)) == 1


def test_all_cocycles_budget():
    z16 = make_group([2, 2, 2, 2])
    with pytest.raises(BudgetExceeded):
        all_cocycles(z16, z16)
    sampled = sample_cocycles(z16, z16, seed=7, count=3)
    assert len(sampled) == 3
    assert sampled == sample_cocycles(z16, z16, seed=7, count=3)


def test_cocycle_representatives():
    reps = cocycle_class_representatives(Z4, Z4)
    assert len(reps) == 4  # Ext(Z/4, Z/4) has order 4
    reps = cocycle_class_representatives(Z2, Z2)
    assert len(reps) == 2


def test_topologized_groups_count():
    # 5 classes up to order 4 with 1 + 2 + 2 + 5 + 3 subgroups
    assert len(topologized_groups(4)) == 13


def test_unknown_theorem_and_hypothesis():
    with pytest.raises(UnknownTheorem):
        run_search(SearchTask("bogus", family=SMALL))
    with pytest.raises(UnknownHypothesis):
        run_search(SearchTask("p3_generalized", ("not_a_hyp",), SMALL))


def test_determinism_byte_identical():
    task = SearchTask("five_lemma_nagao", family=SMALL)
    out1 = run_search(task).to_jsonl()
    out2 = run_search(task).to_jsonl()
    assert out1 == out2
    sampled = FamilySpec(max_group_order=3, generators=("sampled",), sample_count=40, seed=5)
    t2 = SearchTask("p3_generalized", family=sampled)
    assert run_search(t2).to_jsonl() == run_search(t2).to_jsonl()


def test_parallel_matches_serial():
    task = SearchTask("five_lemma_nagao", family=SMALL)
    serial = run_search(task, threads=1)
    parallel = run_search(task, threads=2)
    assert serial.to_jsonl() == parallel.to_jsonl()


def test_negative_control_alpha_dropped():
    """Dropping alpha-continuity lets the search find split-extension
    witnesses with an identity map from an indiscrete to a discrete kernel."""
    task = SearchTask(
        "p3_generalized", ("alpha_continuous",), SMALL
    )
    res = run_search(task)
    assert res.failure_count >= 1
    for rep in res.failures:
        assert rep.witness is not None
        replayed = replay_witness("p3_generalized", rep.witness, ("alpha_continuous",))
        assert replayed.conclusion_checked is False


def test_verify_mode_zero_failures_on_sound_theorems():
    for tid in ("p3_generalized", "strictness_injectivity", "haus_exactness"):
        fam = SMALL if tid != "haus_exactness" else FamilySpec(max_group_order=2)
        res = run_search(SearchTask(tid, family=fam))
        assert res.failure_count == 0, tid


def test_stop_at_first():
    task = SearchTask("five_lemma_nagao", family=SMALL, stop_at_first=True)
    res = run_search(task)
    assert res.failure_count == 1


def test_witnesses_shrink_and_replay():
    task = SearchTask("five_lemma_nagao", family=SMALL)
    res = run_search(task)
    assert res.failure_count > 0
    for rep in res.failures[:5]:
        inst = instance_from_json(rep.witness)
        again = replay_witness("five_lemma_nagao", rep.witness)
        assert again.conclusion_checked is False


def test_task_json_roundtrip():
    task = SearchTask(
        "open_fibers",
        ("sigma_open_fibers",),
        FamilySpec(3, 5, 11, ("sampled",), 20),
        True,
    )
    assert SearchTask.from_json(task.to_json()) == task


def test_topologizable_search_finds_witnesses():
    """The nontrivial class over an indiscrete quotient with Hausdorff kernel
    has no topologizing section: every h_s stays in the class, so h_s(1,1)
    lands outside the trivial core."""
    res = run_search(
        SearchTask("topologizable", family=FamilySpec(max_group_order=2))
    )
    assert res.failure_count > 0
    w = res.failures[0].instance
    assert w["h"]["table"][-1][2] != [0]  # the nontrivial class


def test_nagao_comparison_and_choice_discrete_verify():
    spec = FamilySpec(max_group_order=3)
    assert run_search(SearchTask("nagao_comparison", family=spec)).failure_count == 0
    assert run_search(SearchTask("choice_discrete", family=spec)).failure_count == 0
