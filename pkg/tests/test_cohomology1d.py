"""
Tests for border forcing, the approximant complexes and first cohomology.

Copyright (C) 2020 Nicholas H.Tollervey
"""
import pytest  # type: ignore
from fusionlab.cohomology1d import (
    ap_complex,
    border_forcing_check,
    h1_direct_limit,
)
from fusionlab.ruledsl import DimensionMismatch, load_catalog


@pytest.fixture
def ap_example():
    return load_catalog("ap_example")


def test_border_forcing(ap_example):
    """
    Every supertile starts with a and ends with b from level 2 on.
    """
    for rule in (ap_example, load_catalog("border_forcing")):
        result = border_forcing_check(rule, 1, 4)
        assert result.forced
        assert result.forced_at == 2
        assert result.contexts == {"a": [("b", "a")], "b": [("b", "a")]}


def test_fibonacci_never_forces_the_border():
    """
    An a-supertile may follow either type, and they end differently.
    """
    result = border_forcing_check(load_catalog("fibonacci_1d"), 1, 4)
    assert not result.forced
    assert result.forced_at is None
    assert result.contexts == {}


def test_ap_complex(ap_example):
    """
    Two circles glued at one vertex.
    """
    complex_ = ap_complex(ap_example, 1)
    assert complex_.cells == [("a", 3), ("b", 5)]
    assert len(complex_.vertex_classes) == 1
    assert complex_.first_betti == 2
    assert complex_.winding == [[1, 2], [2, 3]]


def test_h1_unimodular(ap_example):
    """
    Determinant -1 at every level: the direct limit is Z^2.
    """
    report = h1_direct_limit(ap_example, 4)
    assert report.matrices == [[[1, 2], [2, 3]]] * 3
    assert report.determinants == [-1, -1, -1]
    assert report.ranks == [2, 2, 2]
    assert report.invariant_factors == [[1, 1]] * 3
    assert report.stabilized
    assert report.description == "ℤ² (stable)"
    assert report.border_forced
    assert report.label == ""


def test_h1_periodic():
    """
    Doubling one circle is not unimodular.
    """
    report = h1_direct_limit(load_catalog("periodic"), 3)
    assert report.matrices == [[[2]], [[2]]]
    assert report.determinants == [2, 2]
    assert report.invariant_factors == [[2], [2]]
    assert not report.stabilized
    assert "non-unimodular" in report.description


def test_h1_without_border_forcing():
    """
    Without border forcing the result is only informational.
    """
    report = h1_direct_limit(load_catalog("fibonacci_1d"), 3)
    assert report.description == "ℤ² (stable)"
    assert not report.border_forced
    assert report.label == "pre-collaring, informational only"
    assert report.recognizable


def test_two_dimensional_rules_refused():
    """
    Cohomology is computed for 1-D rules only.
    """
    with pytest.raises(DimensionMismatch):
        h1_direct_limit(load_catalog("fibonacci_dpv"), 3)
