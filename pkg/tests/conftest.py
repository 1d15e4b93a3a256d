"""Shared fixtures: bundled data files parsed once per session."""

from importlib import resources

import pytest

from polysphere import parse_facet_list

DATA = resources.files("polysphere") / "data"


def data_text(name: str) -> str:
    return (DATA / name).read_text()


@pytest.fixture(scope="session")
def w12():
    return parse_facet_list(data_text("w12_40.txt"))


@pytest.fixture(scope="session")
def w9():
    return parse_facet_list(data_text("w9.txt"))


@pytest.fixture(scope="session")
def w10():
    return parse_facet_list(data_text("w10.txt"))


@pytest.fixture(scope="session")
def delta5():
    return parse_facet_list(data_text("delta5.txt"))


@pytest.fixture(scope="session")
def hypersimplex():
    return parse_facet_list(data_text("hypersimplex.txt"))


@pytest.fixture(scope="session")
def hypersimplex_dual():
    return parse_facet_list(data_text("hypersimplex_dual.txt"))
