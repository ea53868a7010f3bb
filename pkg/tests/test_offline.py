from fractions import Fraction

import pytest

from delaymatch.generators import gen_random_instance, gen_tightness_instance
from delaymatch.instance import MBPMD, MPMD, make_instance
from delaymatch.offline import (
    BRUTE_LIMIT,
    BruteForceSizeError,
    VariantError,
    opt_brute,
    opt_hungarian,
)

LINE = {"kind": "line"}


def test_brute_picks_the_cheaper_pairing():
    # distance pairing (0-1, 2-3) costs 2 + 2; crossing (0-2, 1-3) costs 2 + 2 + waits
    inst = make_instance(MPMD, LINE, [(0, 0, 0), (2, 0, 0), (10, 0, 0), (12, 0, 0)])
    sol = opt_brute(inst)
    assert sol.value == 4
    assert sol.pairs == ((0, 1), (2, 3))
    assert sol.method == "brute"


def test_brute_counts_waiting_between_arrivals():
    # matching the co-located pair still pays the arrival gap
    inst = make_instance(MPMD, LINE, [(0, 0, 0), (0, 3, 0)])
    sol = opt_brute(inst)
    assert sol.value == 3


def test_brute_respects_polarity():
    inst = make_instance(
        MBPMD, LINE, [(0, 0, 1), (0, 0, 1), (5, 0, -1), (5, 0, -1)], mode="exact"
    )
    sol = opt_brute(inst)
    assert sol.value == 10
    assert sol.pairs == ((0, 2), (1, 3))


def test_brute_empty_instance():
    inst = make_instance(MPMD, LINE, [])
    sol = opt_brute(inst)
    assert sol.value == 0
    assert sol.pairs == ()


def test_brute_refuses_oversized_instances():
    inst = gen_random_instance(seed=0, m=BRUTE_LIMIT // 2 + 1, variant=MPMD)
    with pytest.raises(BruteForceSizeError):
        opt_brute(inst)


def test_hungarian_requires_bipartite_variant():
    inst = make_instance(MPMD, LINE, [(0, 0, 0), (1, 0, 0)])
    with pytest.raises(VariantError):
        opt_hungarian(inst)


def test_hungarian_matches_brute_on_small_instances():
    for seed in range(40):
        inst = gen_random_instance(
            seed=seed, m=1 + seed % 5, variant=MBPMD, metric_kind=("line", "ring", "matrix")[seed % 3]
        )
        b = opt_brute(inst)
        h = opt_hungarian(inst)
        assert h.value == b.value, (seed, h.value, b.value)
        assert h.method == "hungarian"


def test_hungarian_on_tightness_family():
    for m in (4, 10):
        inst = gen_tightness_instance(m, variant=MBPMD)
        assert opt_hungarian(inst).value == 2 * (1 + Fraction(m - 1, m))


def test_hungarian_pairs_form_a_perfect_matching():
    inst = gen_random_instance(seed=5, m=6, variant=MBPMD, metric_kind="line")
    sol = opt_hungarian(inst)
    seen = [u for pair in sol.pairs for u in pair]
    assert sorted(seen) == list(range(12))
    for u, v in sol.pairs:
        assert inst.eligible(u, v)
