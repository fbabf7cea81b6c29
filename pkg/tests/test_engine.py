"""
Tests for transition matrices, expansion, primitivity and inducing.

Copyright (C) 2020 Nicholas H.Tollervey
"""
import pytest  # type: ignore
from collections import Counter
from fractions import Fraction
from fusionlab.core import (
    ConcretePatch,
    FusionLabError,
    LevelOutOfRange,
    Run,
)
from fusionlab.engine import (
    ExpansionTooLarge,
    HorizonTooSmall,
    adjacency_complexity,
    count_patch,
    descend_runs,
    descend_word,
    expand,
    find_induce_step,
    induce,
    induce_step,
    perron_eigenvalue,
    population,
    primitivity,
    rank_bound,
    strong_primitivity,
    transition_matrix,
    transition_step,
    van_hove_diagnostic,
)
from fusionlab.ruledsl import load_catalog, parse_rule


@pytest.fixture
def fibonacci():
    return load_catalog("fibonacci_1d")


@pytest.fixture
def chacon():
    return load_catalog("chacon")


@pytest.fixture
def dpv():
    return load_catalog("fibonacci_dpv")


def test_transition_step(fibonacci):
    """
    Column j of M_{n-1,n} is the population of P_n(j).
    """
    matrix = transition_step(fibonacci, 1)
    assert matrix.source == 0
    assert matrix.target == 1
    assert matrix.entries == ((1, 1), (1, 0))


def test_transition_matrix_composes(fibonacci):
    """
    M_{n,N} is the product of the steps between n and N.
    """
    assert transition_matrix(fibonacci, 0, 3).entries == ((3, 2), (2, 1))
    assert transition_matrix(fibonacci, 1, 4).entries == ((3, 2), (2, 1))
    assert transition_matrix(fibonacci, 2, 2).entries == ((1, 0), (0, 1))
    with pytest.raises(LevelOutOfRange):
        transition_matrix(fibonacci, 3, 2)


def test_population_matches_expansion(fibonacci, dpv):
    """
    Counting through matrices agrees with counting the expanded tiles.
    """
    for rule in (fibonacci, dpv):
        for j in range(rule.count(4)):
            counts = Counter(expand(rule, 4, j).kinds)
            expected = population(rule, 4, j, 0)
            assert [counts[k] for k in range(len(expected))] == list(
                expected
            )


def test_expand_one_dimensional(fibonacci):
    """
    P_3(a) of the Fibonacci rule is the word abaab, laid end to end.
    """
    patch = expand(fibonacci, 3, 0)
    assert patch.level == 0
    assert patch.tiles == (
        (0, (0,)),
        (1, (1,)),
        (0, (2,)),
        (0, (3,)),
        (1, (4,)),
    )
    upper = expand(fibonacci, 3, 0, 1)
    assert upper.tiles == ((0, (0,)), (1, (2,)), (0, (3,)))
    with pytest.raises(LevelOutOfRange):
        expand(fibonacci, 2, 0, 3)


def test_expand_two_dimensional(dpv):
    """
    P_1(a) is a 2 x 2 block with rows listed from the bottom.
    """
    patch = expand(dpv, 1, 0)
    assert patch.occupancy() == {(0, 0): 0, (1, 0): 1, (0, 1): 2, (1, 1): 3}
    assert len(expand(dpv, 3, 0)) == 25


def test_descend_runs(chacon):
    """
    Runs of equal kinds are merged across children.
    """
    assert descend_runs(chacon, 2, 0, 0) == (
        (0, 2),
        (1, 1),
        (0, 3),
        (1, 1),
        (0, 1),
        (1, 1),
        (0, 2),
        (1, 1),
        (0, 1),
    )
    assert descend_word(chacon, 1, 0, 0) == [0, 0, 1, 0]


def test_expansion_cap(fibonacci):
    """
    An expansion over the cap is refused with the exact tile count.
    """
    with pytest.raises(ExpansionTooLarge) as ex:
        expand(fibonacci, 10, 0, cap=10)
    assert ex.value.count == 144
    assert ex.value.cap == 10
    assert "144" in str(ex.value)


def test_expansion_cap_from_environment(fibonacci, monkeypatch):
    """
    The default cap is read from FUSIONLAB_CAP.
    """
    monkeypatch.setenv("FUSIONLAB_CAP", "20")
    assert len(expand(fibonacci, 5, 0)) == 13
    with pytest.raises(ExpansionTooLarge) as ex:
        expand(fibonacci, 6, 0)
    assert ex.value.count == 21


def test_fibonacci_is_primitive(fibonacci):
    """
    M_{n,n+2} is positive for the Fibonacci rule, M_{n,n+1} is not.
    """
    report = primitivity(fibonacci, 3)
    assert report.witnesses == {0: 2, 1: 3, 2: 4}
    assert report.certificate is None
    assert report.status == "Primitive"
    assert report.primitive
    assert strong_primitivity(fibonacci, 3) == (False, False, False)


def test_chacon_is_not_primitive(chacon):
    """
    b never contains a, and the zero pattern proves it at every level.
    """
    report = primitivity(chacon, 4)
    assert report.witnesses == {}
    assert report.status == "NotPrimitive"
    assert not report.primitive
    assert report.certificate["zero"] == ["a", "b"]
    assert report.certificate["pattern"] == [[1, 0], [1, 1]]


def test_primitivity_of_explicit_rule():
    """
    A rule that stops early cannot be certified either way.
    """
    rule = parse_rule(
        "dim 1\ntile a len 1\ntile b len 1\n"
        "level 1: a -> a ; b -> b\nlevel 2: a -> a ; b -> b\n"
    )
    report = primitivity(rule, 4)
    assert report.horizon == 2
    assert report.status == "Inconclusive"


def test_induce_step(fibonacci):
    """
    Inducing on every second level composes pairs of steps.
    """
    assert induce_step(fibonacci, 1) is fibonacci
    induced = induce_step(fibonacci, 2)
    assert induced.level(1)[0].composition == (Run(0, 1), Run(1, 1), Run(0, 1))
    assert induced.size(1, 0) == (3,)
    assert induced.size(2, 0) == (8,)
    assert transition_step(induced, 1).is_positive()


def test_induce_levels(fibonacci):
    """
    Inducing on an explicit list of levels.
    """
    induced = induce(fibonacci, [0, 2, 3])
    assert induced.max_level == 2
    assert induced.size(2, 0) == (5,)
    assert induced.labels(2) == ("a", "b")
    with pytest.raises(LevelOutOfRange):
        induced.level(3)
    with pytest.raises(LevelOutOfRange):
        induce(fibonacci, [1, 2])
    with pytest.raises(LevelOutOfRange):
        induce(fibonacci, [0, 2, 2])


def test_find_induce_step(fibonacci, chacon):
    """
    Two Fibonacci steps make a positive matrix; Chacon never does.
    """
    assert find_induce_step(fibonacci, 4, 3) == 2
    assert find_induce_step(chacon, 4, 3) is None


def test_perron_eigenvalue(fibonacci):
    """
    The dominant eigenvalue of the step matrices.
    """
    golden = (1 + 5 ** 0.5) / 2
    assert perron_eigenvalue(transition_step(fibonacci, 1)) == pytest.approx(
        golden
    )
    nonpisot = load_catalog("nonpisot_dpv")
    assert perron_eigenvalue(transition_step(nonpisot, 1)) == pytest.approx(
        (7 + 13 ** 0.5) / 2
    )


def test_adjacency_complexity_one_dimensional(fibonacci):
    """
    Fibonacci supertiles meet as ab, ba and aa, never bb.
    """
    for n in range(1, 4):
        assert adjacency_complexity(fibonacci, n) == 3


def test_adjacency_complexity_direct_product(dpv):
    """
    Three horizontal pairs for each row type, and the same vertically.
    """
    assert adjacency_complexity(dpv, 1) == 12
    assert adjacency_complexity(dpv, 2) == 12


def test_adjacency_needs_levels():
    """
    A rule that stops too early cannot be harvested.
    """
    rule = parse_rule(
        "dim 1\ntile a len 1\nlevel 1: p -> a a\nlevel 2: q -> p p\n"
    )
    with pytest.raises(HorizonTooSmall):
        adjacency_complexity(rule, 1)


def test_count_patch_one_dimensional(fibonacci):
    """
    aa occurs three times in abaababaabaab.
    """
    haystack = expand(fibonacci, 5, 0)
    needle = ConcretePatch(1, 0, ((0, (0,)), (0, (1,))), ((1,), (1,)))
    assert count_patch(haystack, needle) == 3
    moved = needle.translate((7,))
    assert count_patch(haystack, moved) == 3


def test_count_patch_two_dimensional(dpv):
    """
    Single tiles are counted by their population.
    """
    haystack = expand(dpv, 3, 0)
    sizes = tuple((1, 1) for _ in range(4))
    needle = ConcretePatch(2, 0, ((3, (0, 0)),), sizes)
    assert count_patch(haystack, needle) == population(dpv, 3, 0, 0)[3]
    with pytest.raises(FusionLabError):
        count_patch(haystack, ConcretePatch(1, 0, ((0, (0,)),), ((1,),)))


def test_van_hove_diagnostic(fibonacci, dpv):
    """
    Boundary to volume ratios of r-thickened supertiles.
    """
    assert van_hove_diagnostic(fibonacci, 2, Fraction(1, 2)) == {
        "a": Fraction(1, 3),
        "b": Fraction(1, 2),
    }
    assert van_hove_diagnostic(dpv, 1, 1)["a"] == 3
    assert van_hove_diagnostic(dpv, 1, 0)["d"] == 0


def test_rank_bound(fibonacci):
    """
    The fewest supertile types over the levels, and where.
    """
    assert rank_bound(fibonacci, 4) == (2, 1)
    scrambled = load_catalog("scrambled_fibonacci", {"levels": "2"})
    assert rank_bound(scrambled, 4) == (2, 2)
