"""Acceptance gate: the ten headline checks, one pass/fail line each.

Each test prints `ACCEPTANCE <k>: PASS - <summary>` on success; a failure
shows up as the usual pytest failure for that criterion.  The two
long-budget pieces (the n=10 classification and the 1% frontier sample)
are split into slow-marked companions of criteria 2 and 10.
"""

import random
import time

import pytest

from polysphere import (
    canonical_form,
    face_lattice,
    flag_vector,
    is_2simple,
    is_2simplicial,
    is_eulerian,
)
from polysphere.bfp import bfp_search, bfp_verify, parse_bfp, parse_chirotope
from polysphere.certificates import ReplayError, certificate_to_text, replay_text
from polysphere.chirotope import (
    _relation_table,
    _term_value,
    diagram_partial_chirotope,
    diagram_ridge_groups,
    prove_nonpolytopal,
    sample_frontier,
)
from polysphere.enumeration import classify, p_vector_candidates
from polysphere.geomcert import (
    chirotope_from_points,
    embeddability_report,
    parse_points,
    verify_diagram,
    verify_fan,
)

from conftest import data_text
from test_certificates import _mutate_line
from test_chirotope import CHAIN, SEED, _gp_ok
from test_enumeration import brute_force_canonical_set


def _ok(k, summary):
    print(f"ACCEPTANCE {k}: PASS - {summary}", flush=True)


def test_criterion_01_flag_vector_regression(w12):
    start = time.monotonic()
    lattice = face_lattice(w12)
    assert flag_vector(lattice).key() == (12, 40, 40, 12, 120)
    assert is_2simple(lattice) and is_2simplicial(lattice)
    ok, witness = is_eulerian(lattice)
    assert ok and witness is None
    elapsed = time.monotonic() - start
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    _ok(1, f"flag vector (12,40,40,12;120), 2s2s, Eulerian in {elapsed:.2f}s")


def test_criterion_02_classification_table_small_n(w9):
    start = time.monotonic()
    rows = {n: classify(n) for n in range(5, 10)}
    assert len(rows[5].types) == 1
    assert not rows[6].types and not rows[7].types and not rows[8].types
    assert len(rows[9].types) == 1
    assert rows[9].types[0].flag == (9, 26, 26, 9, 78)
    assert rows[9].types[0].canonical == canonical_form(w9)
    elapsed = time.monotonic() - start
    assert elapsed < 600, f"took {elapsed:.1f}s"
    _ok(2, f"n=5..9 table rows reproduced in {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_02_classification_n10(w10):
    start = time.monotonic()
    out = classify(10)
    assert len(out.types) == 3
    assert all(t.flag == (10, 30, 30, 10, 90) for t in out.types)
    assert canonical_form(w10) in {t.canonical for t in out.types}
    elapsed = time.monotonic() - start
    assert elapsed < 4 * 3600, f"took {elapsed:.1f}s"
    _ok(2, f"n=10 gives exactly three types with flag (10,30,30,10;90) in {elapsed:.1f}s")


def test_criterion_03_pvector_count():
    assert len(p_vector_candidates(12, 40)) == 23
    _ok(3, "p_vector_candidates(12, 40) has exactly 23 entries")


def test_criterion_04_contradiction_and_chain(w12):
    start = time.monotonic()
    cert = prove_nonpolytopal(w12, SEED, 1)
    assert cert.verdict == "CONTRADICTION"
    for tup, sign in CHAIN:
        assert cert.chirotope.query(tup) == sign, tup
    elapsed = time.monotonic() - start
    assert elapsed < 60, f"took {elapsed:.1f}s"
    _ok(4, f"CONTRADICTION with all 23 chain signs matched in {elapsed:.1f}s")


def test_criterion_05_mirror_seed(w12):
    plus = prove_nonpolytopal(w12, SEED, 1)
    minus = prove_nonpolytopal(w12, SEED, -1)
    assert minus.verdict == "CONTRADICTION"
    for basis, s in plus.chirotope.determined_items():
        assert minus.chirotope.signs[minus.chirotope.index[basis]] == -s
    _ok(5, "seed -1 yields CONTRADICTION with the negated fixpoint")


def test_criterion_06_diagram_derived_counts(w12):
    start = time.monotonic()
    counts = {}
    for base in range(12):
        cert = diagram_partial_chirotope(w12, base)
        counts[base] = cert.derived
        assert 199 <= cert.derived <= 328, (base, cert.derived)
    elapsed = time.monotonic() - start
    assert elapsed < 300, f"took {elapsed:.1f}s"
    _ok(6, f"derived counts {min(counts.values())}..{max(counts.values())} for all 12 bases in {elapsed:.1f}s")


def test_criterion_07_coordinate_certificates(w12):
    start = time.monotonic()
    dia = parse_points(data_text("diagram_f2_coords.txt"))
    fan = parse_points(data_text("fan_coords.txt"))
    rep_d = verify_diagram(dia, w12, 1)
    rep_f = verify_fan(fan, w12)
    assert rep_d.verdict and rep_f.verdict
    assert rep_d.to_text() == verify_diagram(dia.scaled(7), w12, 1).to_text()
    assert rep_f.to_text() == verify_fan(fan.scaled(7), w12).to_text()
    elapsed = time.monotonic() - start
    assert elapsed < 60, f"took {elapsed:.1f}s"
    _ok(7, f"diagram and fan coordinates verify; scale-7 reports byte-identical ({elapsed:.1f}s)")


def test_criterion_08_structural_facts(w12):
    rep = embeddability_report(w12)
    assert dict(rep.simple_vertices) == {
        3: (0, 1, 2, 7),
        6: (1, 3, 5, 8),
        7: (1, 4, 6, 10),
        9: (2, 3, 6, 9),
    }
    assert rep.facets_without_simple == (11,)
    _ok(8, "simple vertices v3,v6,v7,v9 with expected incidences; only F11 lacks one")


def test_criterion_09_oracle_equivalence(w12):
    # enumeration vs brute force
    for n in (5, 6):
        assert {t.canonical for t in classify(n).types} == brute_force_canonical_set(n)
    # 1e5 sampled three-term relations on the two determinant chirotopes
    for name in ("diagram_f2_coords.txt", "fan_coords.txt"):
        pc = chirotope_from_points(parse_points(data_text(name)), "affine")
        table, _ = _relation_table(pc.n, pc.rank)
        rng = random.Random(99)
        for _ in range(50_000):
            _, _, terms = table[rng.randrange(len(table))]
            signs = [
                (1, -1, 1)[k] * _term_value(pc, terms[2 * k], terms[2 * k + 1])
                for k in range(3)
            ]
            assert _gp_ok(signs)
    # replayer accepts generated certificates, rejects 100 mutations
    text = certificate_to_text(prove_nonpolytopal(w12, SEED, 1))
    facet_sets = w12.to_sets()
    replay_text(text, facet_sets)
    replay_text(certificate_to_text(diagram_partial_chirotope(w12, 1)), facet_sets)
    lines = text.splitlines()
    step_ids = [i for i, ln in enumerate(lines) if ln.startswith("STEP ")]
    rng = random.Random(4242)
    rejected = 0
    attempts = 0
    while rejected < 100 and attempts < 1000:
        attempts += 1
        i = rng.choice(step_ids)
        mutated = _mutate_line(rng, lines[i])
        if mutated is None or mutated == lines[i]:
            continue
        bad = "\n".join(lines[:i] + [mutated] + lines[i + 1:]) + "\n"
        try:
            replay_text(bad, facet_sets)
        except (ReplayError, ValueError):
            rejected += 1
            continue
        pytest.fail(f"mutation accepted: {mutated!r}")
    assert rejected == 100
    _ok(9, "brute-force parity (n=5,6), 1e5 clean relation samples, 100/100 mutations rejected")


def test_criterion_10_final_polynomial_machinery():
    node = parse_chirotope(data_text("f12_frontier_node.txt"))
    cert = parse_bfp(data_text("f12_frontier_node.bfp"))
    assert bfp_verify(node, cert)
    realizable = chirotope_from_points(
        parse_points(data_text("diagram_f2_coords.txt")), "affine"
    )
    assert bfp_search(realizable) is None
    _ok(10, "bundled certificate verifies; search finds nothing on the realizable chirotope")


@pytest.mark.slow
def test_criterion_10_frontier_sample(w12):
    # a random 1% sample of the ~6098-node search frontier over the last base
    count = 61
    cert = diagram_partial_chirotope(w12, 11)
    groups = diagram_ridge_groups(w12, 11)
    nodes = sample_frontier(cert.chirotope, groups=groups, floor=435, count=count, seed=20260823)
    assert len(nodes) == count
    for node in nodes:
        found = bfp_search(node.chirotope)
        assert found is not None and bfp_verify(node.chirotope, found)
    _ok(10, f"all {count} sampled frontier chirotopes refuted by verified certificates")
