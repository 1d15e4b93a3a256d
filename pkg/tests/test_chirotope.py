"""Partial chirotopes: alternating closure, propagation rules, search."""

import random
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polysphere.chirotope import (
    ChirotopeConflict,
    PartialChirotope,
    _relation_table,
    _term_value,
    apply_p2,
    apply_ridge_rule,
    complete_search,
    diagram_partial_chirotope,
    diagram_ridge_groups,
    diagram_seed,
    from_sphere_rank5,
    gp_propagate,
    prove_nonpolytopal,
    sample_frontier,
    seed_is_justified,
    sort_with_parity,
)
from polysphere.geomcert import chirotope_from_points, parse_points

from conftest import data_text

# The fixed sign chain that pins down the non-polytopality contradiction:
# ordered tuples and the sign each must receive during propagation.
CHAIN = [
    ((7, 8, 10, 2, 9), 1),
    ((7, 8, 10, 11, 9), 1),
    ((7, 8, 10, 4, 9), 1),
    ((7, 8, 10, 1, 9), 1),
    ((8, 10, 11, 2, 9), -1),
    ((7, 8, 10, 11, 2), -1),
    ((4, 8, 10, 11, 2), -1),
    ((8, 10, 2, 1, 9), 1),
    ((8, 10, 0, 1, 9), 1),
    ((4, 10, 2, 1, 9), 1),
    ((4, 8, 10, 2, 1), -1),
    ((8, 7, 0, 1, 9), 1),
    ((8, 7, 0, 4, 9), 1),
    ((8, 7, 0, 4, 5), 1),
    ((8, 7, 0, 4, 11), 1),
    ((8, 7, 0, 4, 1), 1),
    ((4, 8, 10, 7, 11), 1),
    ((4, 8, 10, 7, 1), 1),
    ((11, 7, 0, 4, 5), 1),
    ((11, 7, 2, 4, 5), 1),
    ((11, 1, 2, 4, 5), 1),
    ((11, 1, 2, 4, 8), 1),
    ((4, 8, 10, 11, 1), 1),
]

SEED = (7, 8, 10, 2, 9)


def test_sort_with_parity():
    assert sort_with_parity((1, 2, 3)) == ((1, 2, 3), 1)
    assert sort_with_parity((2, 1, 3)) == ((1, 2, 3), -1)
    assert sort_with_parity((3, 1, 2)) == ((1, 2, 3), 1)
    assert sort_with_parity((1, 1, 2)) == (None, 0)


@given(st.permutations(list(range(5))))
def test_parity_matches_inversion_count(perm):
    _, sign = sort_with_parity(tuple(perm))
    inversions = sum(
        1 for i in range(5) for j in range(i + 1, 5) if perm[i] > perm[j]
    )
    assert sign == (-1) ** inversions


def test_alternating_closure():
    pc = PartialChirotope(6, 4)
    pc.assign((0, 1, 2, 3), 1)
    assert pc.query((1, 0, 2, 3)) == -1
    assert pc.query((1, 2, 3, 0)) == -1
    assert pc.query((0, 0, 2, 3)) == 0
    assert pc.query((0, 1, 2, 4)) is None
    with pytest.raises(ChirotopeConflict):
        pc.assign((1, 0, 2, 3), 1)


def test_p1_zeros_inside_facets(w12):
    pc = from_sphere_rank5(w12)
    # five vertices of the 7-vertex facet {0,2,3,4,5,6,7} are coplanar
    assert pc.query((0, 2, 3, 4, 5)) == 0
    # a spanning 5-tuple stays undetermined
    assert pc.query(SEED) is None


def test_seed_is_justified(w12):
    assert seed_is_justified(w12, SEED)
    # no four of these five elements form a facet 2-face pattern
    assert not seed_is_justified(w12, (0, 2, 3, 4, 5))


def test_nonpolytopality_contradiction(w12):
    cert = prove_nonpolytopal(w12, SEED, 1)
    assert cert.verdict == "CONTRADICTION"
    pc = cert.chirotope
    for tup, sign in CHAIN:
        assert pc.query(tup) == sign, tup


def test_mirror_seed_negates_everything(w12):
    plus = prove_nonpolytopal(w12, SEED, 1)
    minus = prove_nonpolytopal(w12, SEED, -1)
    assert minus.verdict == "CONTRADICTION"
    for basis, s in plus.chirotope.determined_items():
        assert minus.chirotope.signs[minus.chirotope.index[basis]] == -s


def test_polytopal_controls_have_no_contradiction(delta5, hypersimplex):
    for fl in (delta5, hypersimplex):
        for basis in permutations(range(5)):
            if seed_is_justified(fl, basis):
                cert = prove_nonpolytopal(fl, basis, 1)
                assert cert.verdict != "CONTRADICTION"
                break
        else:
            pytest.fail("no justified seed found")


def test_p2_copies_across_facet(w12):
    pc = from_sphere_rank5(w12)
    pc.assign(SEED, 1)
    apply_p2(pc, w12)
    # facet F5 = {0,4,7,8}: every point off it sees it with a fixed relative
    # orientation, so determined signs over its vertex quadruple must agree
    quad = (0, 4, 7, 8)
    seen = {}
    for x in range(12):
        if x in quad:
            continue
        v = pc.query((x,) + quad)
        if v is not None:
            seen[x] = v
    assert seen  # the rule fired at all
    assert len(set(seen.values())) == 1


def _gp_ok(signs):
    nonzero = [s for s in signs if s]
    if not nonzero:
        return True
    return 1 in nonzero and -1 in nonzero


@pytest.mark.parametrize("name,dim", [("diagram_f2_coords.txt", 3), ("fan_coords.txt", 4)])
def test_gp_sampling_on_determinant_chirotopes(name, dim):
    pc = chirotope_from_points(parse_points(data_text(name)), "affine")
    table, _ = _relation_table(pc.n, pc.rank)
    rng = random.Random(99)
    for _ in range(50_000):
        lam, quad, terms = table[rng.randrange(len(table))]
        tsigns = (1, -1, 1)
        signs = [
            tsigns[k] * _term_value(pc, terms[2 * k], terms[2 * k + 1])
            for k in range(3)
        ]
        assert _gp_ok(signs), (lam, quad)


def test_gp_propagate_detects_violation():
    # three collinear-free points plus a flipped sign break a GP relation
    pc = chirotope_from_points(parse_points(data_text("diagram_f2_coords.txt")), "affine")
    bad = pc.copy()
    # flipping one basis of a fully determined chirotope must break some
    # three-term relation
    key = bad.bases[0]
    bad.signs[bad.index[key]] *= -1
    with pytest.raises(ChirotopeConflict):
        gp_propagate(bad)


def test_diagram_fixpoint_is_schedule_independent(w12):
    base = 1
    reference = diagram_partial_chirotope(w12, base).chirotope
    groups = diagram_ridge_groups(w12, base)
    seed = diagram_seed(w12)
    rng = random.Random(5)
    for _ in range(20):
        pc = PartialChirotope(w12.n, 4)
        pc.assign(seed, 1)
        changed = True
        while changed:
            rules = [
                lambda: apply_ridge_rule(pc, groups),
                lambda: gp_propagate(pc),
            ]
            rng.shuffle(rules)
            changed = False
            for rule in rules:
                changed = rule() or changed
        assert pc.signs == reference.signs


def test_diagram_derived_counts_for_one_base(w12):
    cert = diagram_partial_chirotope(w12, 1)
    assert 199 <= cert.derived <= 328
    assert cert.chirotope.num_determined() == cert.derived + 1


def test_complete_search_recovers_erased_signs():
    pc = chirotope_from_points(parse_points(data_text("diagram_f2_coords.txt")), "affine")
    original = list(pc.signs)
    rng = random.Random(17)
    erased = pc.copy()
    for i in rng.sample(range(len(erased.signs)), 5):
        erased.signs[i] = None
    out = complete_search(erased)
    assert out.complete
    assert original in [c.signs for c in out.completions]


def test_complete_search_flags_unsatisfiable_instance():
    pc = chirotope_from_points(parse_points(data_text("diagram_f2_coords.txt")), "affine")
    # erase one basis and flip another that shares a relation with it so that
    # both candidate signs conflict somewhere
    table, by_basis = _relation_table(pc.n, pc.rank)
    target = pc.bases[0]
    broken = pc.copy()
    broken.signs[0] = None
    # flip every other basis appearing with the target in some relation
    ridx = by_basis[target][0]
    _, _, terms = table[ridx]
    for key, _ in terms:
        if key != target:
            broken.signs[broken.index[key]] *= -1
    out = complete_search(broken)
    assert out.completions == [] or all(
        c.signs != pc.signs for c in out.completions
    )


@pytest.mark.slow
def test_sampled_frontier_nodes_have_final_polynomials(w12):
    from polysphere.bfp import bfp_search, bfp_verify

    cert = diagram_partial_chirotope(w12, 11)
    groups = diagram_ridge_groups(w12, 11)
    nodes = sample_frontier(cert.chirotope, groups=groups, floor=435, count=3, seed=3)
    for node in nodes:
        found = bfp_search(node.chirotope)
        assert found is not None and bfp_verify(node.chirotope, found)
