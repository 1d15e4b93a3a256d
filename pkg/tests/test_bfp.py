"""Final polynomial search and solver-free verification."""

from fractions import Fraction

import pytest

from polysphere.bfp import (
    BfpCertificate,
    BfpInequality,
    bfp_search,
    bfp_to_text,
    bfp_verify,
    chirotope_to_text,
    parse_bfp,
    parse_chirotope,
)
from polysphere.geomcert import chirotope_from_points, parse_points

from conftest import data_text


@pytest.fixture(scope="module")
def node():
    return parse_chirotope(data_text("f12_frontier_node.txt"))


@pytest.fixture(scope="module")
def node_cert():
    return parse_bfp(data_text("f12_frontier_node.bfp"))


@pytest.fixture(scope="module")
def realizable():
    return chirotope_from_points(parse_points(data_text("diagram_f2_coords.txt")), "affine")


def test_bundled_certificate_verifies(node, node_cert):
    assert bfp_verify(node, node_cert)


def test_empty_certificate_is_rejected(node):
    assert not bfp_verify(node, BfpCertificate(node.n, node.rank, ()))


def test_certificate_is_bound_to_its_chirotope(realizable, node_cert):
    assert not bfp_verify(realizable, node_cert)


def test_multiplier_perturbation_flips_acceptance(node, node_cert):
    entries = list(node_cert.entries)
    ineq, mult = entries[0]
    entries[0] = (ineq, mult + Fraction(1, 7))
    assert not bfp_verify(node, BfpCertificate(node.n, node.rank, tuple(entries)))
    entries[0] = (ineq, -mult)
    assert not bfp_verify(node, BfpCertificate(node.n, node.rank, tuple(entries)))


def test_inequality_perturbation_flips_acceptance(node, node_cert):
    entries = list(node_cert.entries)
    ineq, mult = entries[0]
    swapped = BfpInequality(ineq.lam, ineq.quad, ineq.other, ineq.lone)
    entries[0] = (swapped, mult)
    assert not bfp_verify(node, BfpCertificate(node.n, node.rank, tuple(entries)))


def test_search_refutes_the_bundled_node(node):
    found = bfp_search(node)
    assert found is not None
    assert bfp_verify(node, found)


def test_search_returns_none_on_realizable_chirotope(realizable):
    assert bfp_search(realizable) is None


def test_bfp_text_round_trip(node, node_cert):
    again = parse_bfp(bfp_to_text(node_cert))
    assert again == node_cert
    assert bfp_verify(node, again)


def test_chirotope_text_round_trip(node):
    again = parse_chirotope(chirotope_to_text(node))
    assert again.signs == node.signs


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_bfp("not a certificate\n")
    with pytest.raises(ValueError):
        parse_chirotope("not a chirotope\n")
