"""
Tests for the built-in catalog of fusion rules.

Copyright (C) 2020 Nicholas H.Tollervey
"""
import pytest  # type: ignore
from fusionlab.field import PHI
from fusionlab.ruledsl import (
    BadParam,
    UnknownCatalogEntry,
    catalog_names,
    catalog_source,
    load_catalog,
)
from fusionlab.ruledsl.catalog import (
    CATALOG,
    fibonacci_words,
    resolve_params,
    scrambled_source,
)


NAMES = [
    "ap_example",
    "border_forcing",
    "chacon",
    "coincidence_waiting",
    "fibonacci_1d",
    "fibonacci_dpv",
    "nonpisot_dpv",
    "period_doubling",
    "periodic",
    "scrambled_fibonacci",
    "three_letter_kappa",
    "three_tile_solenoid",
    "two_measures",
]


@pytest.fixture
def scrambled_params():
    return {
        "N": "3*n",
        "levels": "2",
        "geometry": "unit",
        "variant": "scrambled",
    }


def test_catalog_names():
    """
    Every entry is listed, sorted, with a one line description.
    """
    names = catalog_names()
    assert [name for name, _ in names] == NAMES
    assert all(description for _, description in names)


def test_every_entry_loads():
    """
    Each entry parses with its default parameters and is named after itself.
    """
    for name in NAMES:
        rule = load_catalog(name)
        assert rule.name == name
        assert rule.count(1) >= 1


def test_unknown_entry():
    """
    Asking for an entry that does not exist names the ones that do.
    """
    with pytest.raises(UnknownCatalogEntry) as ex:
        load_catalog("penrose")
    assert "fibonacci_1d" in str(ex.value)


def test_parameters_checked():
    """
    Only declared parameters, and only their listed choices, are accepted.
    """
    with pytest.raises(BadParam):
        load_catalog("chacon", {"length": "2"})
    with pytest.raises(BadParam):
        load_catalog("fibonacci_1d", {"geometry": "cubic"})
    assert resolve_params(CATALOG["periodic"], {"length": "3"}) == {
        "length": "3"
    }


def test_template_parameters():
    """
    Parameters are filled into the rule file.
    """
    assert "tile a len 5" in catalog_source("periodic", {"length": "5"})
    assert load_catalog("periodic", {"length": "5"}).size(2, 0) == (20,)
    assert load_catalog(
        "fibonacci_1d", {"geometry": "quadratic"}
    ).size(0, 0) == (PHI,)


def test_fibonacci_words():
    """
    F^d(a) and F^d(b) for the Fibonacci substitution.
    """
    assert fibonacci_words(0) == (["a"], ["b"])
    assert fibonacci_words(3) == (list("abaab"), list("aba"))


def test_scrambled_source(scrambled_params):
    """
    Odd levels add the type e (b's population with its a's first); even
    levels swap the first b of each word for e.
    """
    source = scrambled_source(scrambled_params)
    assert "level 1: a -> a b a^2 b ; b -> a b a ; e -> a^2 b" in source
    assert "level 2: a -> a e a^2 b ; b -> a e a" in source


def test_scrambled_rule(scrambled_params):
    """
    The scrambled rule is explicit and has three types at odd levels.
    """
    rule = load_catalog("scrambled_fibonacci", scrambled_params)
    assert rule.max_level == 2
    assert rule.labels(1) == ("a", "b", "e")
    assert rule.labels(2) == ("a", "b")
    assert rule.level(1)[2].population == rule.level(1)[1].population
    assert rule.level(2)[0].children() == [0, 2, 0, 0, 1]


def test_accelerated_rule():
    """
    Without scrambling, every level is F^d over the level below.
    """
    rule = load_catalog(
        "scrambled_fibonacci",
        {"variant": "accelerated", "levels": "3", "geometry": "unit"},
    )
    assert rule.labels(3) == ("a", "b")
    # d = 3 at every level: lengths grow by F^3, i.e. phi^3 asymptotically.
    assert rule.size(1, 0) == (5,)
    assert rule.size(2, 0) == (21,)


def test_scrambled_rejects_slow_growth(scrambled_params):
    """
    N(n) - N(n-1) has to exceed 2.
    """
    scrambled_params["N"] = "2*n"
    with pytest.raises(BadParam):
        scrambled_source(scrambled_params)
    scrambled_params["N"] = "3*n"
    scrambled_params["levels"] = "many"
    with pytest.raises(BadParam):
        scrambled_source(scrambled_params)
