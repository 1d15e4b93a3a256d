"""Symmetry-reduced classification against a brute-force oracle."""

from itertools import combinations, product

import pytest

from polysphere import (
    FacetList,
    FacetListError,
    LatticeError,
    canonical_form,
    face_lattice,
    flag_vector,
    is_2simple,
    is_2simplicial,
    is_eulerian,
)
from polysphere.canonical import canonical_bytes
from polysphere.complexes import mask_of
from polysphere.enumeration import (
    classify,
    is_connected,
    load_frontier,
    m_range,
    p_vector_candidates,
    save_frontier,
)


def brute_force_canonical_set(n):
    """All sphere types on n vertices by exhaustive search over facet-mask
    combinations, sharing no search logic with the production enumerator."""
    found = set()
    lo, hi = m_range(n)
    for m in range(lo, hi + 1):
        for cand in p_vector_candidates(n, m):
            sizes = cand.sizes()
            per_size = sorted(set(sizes))
            pools = {
                s: [mask_of(c) for c in combinations(range(n), s)]
                for s in per_size
            }
            choice_lists = [
                list(combinations(pools[s], sizes.count(s))) for s in per_size
            ]
            for pick in product(*choice_lists):
                facets = tuple(f for group in pick for f in group)
                union = 0
                for f in facets:
                    union |= f
                if union != (1 << n) - 1 or not is_connected(list(facets)):
                    continue
                try:
                    fl = FacetList(n, facets)
                    lattice = face_lattice(fl)
                except (FacetListError, LatticeError):
                    continue
                if not is_eulerian(lattice)[0]:
                    continue
                if not (is_2simple(lattice) and is_2simplicial(lattice)):
                    continue
                if flag_vector(lattice).f1 != m:
                    continue
                found.add(canonical_bytes(n, facets))
    return found


@pytest.mark.parametrize("n", [5, 6])
def test_oracle_equivalence(n):
    report = classify(n)
    assert report.status == "COMPLETE"
    assert {t.canonical for t in report.types} == brute_force_canonical_set(n)


def test_classify_5_is_the_simplex(delta5):
    report = classify(5)
    assert [t.flag for t in report.types] == [(5, 10, 10, 5, 30)]
    assert report.types[0].canonical == canonical_form(delta5)


@pytest.mark.parametrize("n", [6, 7, 8])
def test_no_types_for_small_n(n):
    report = classify(n)
    assert report.status == "COMPLETE"
    assert report.types == ()


def test_classify_9(w9):
    report = classify(9)
    assert report.status == "COMPLETE"
    assert [t.flag for t in report.types] == [(9, 26, 26, 9, 78)]
    assert report.types[0].canonical == canonical_form(w9)


@pytest.mark.slow
def test_classify_10(w10):
    report = classify(10, budget=4 * 3600.0)
    assert report.status == "COMPLETE"
    assert [t.flag for t in report.types] == [(10, 30, 30, 10, 90)] * 3
    assert canonical_form(w10) in {t.canonical for t in report.types}


def test_budget_expiry_reports_frontier(tmp_path):
    report = classify(9, budget=0.05)
    assert report.status == "PARTIAL"
    assert report.frontier
    path = tmp_path / "frontier.txt"
    save_frontier(report, str(path))
    n, tasks = load_frontier(str(path))
    assert n == 9
    assert list(tasks) == list(report.frontier)


def test_jobs_do_not_change_the_answer():
    seq = classify(6)
    par = classify(6, jobs=2)
    assert [t.canonical for t in seq.types] == [t.canonical for t in par.types]
    assert par.status == "COMPLETE"


def test_resume_from_frontier():
    partial = classify(9, budget=0.05)
    rest = classify(9, tasks=list(partial.frontier), budget=None)
    assert rest.status == "COMPLETE"


def test_p_vector_candidates_rejects_bad_m():
    with pytest.raises(ValueError):
        p_vector_candidates(9, 1)
