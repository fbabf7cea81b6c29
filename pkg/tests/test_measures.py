"""
Tests for direction matrices, frequencies and unique ergodicity.

Copyright (C) 2020 Nicholas H.Tollervey
"""
import pytest  # type: ignore
from fractions import Fraction
from fusionlab import constants
from fusionlab.core import ConcretePatch, LevelOutOfRange
from fusionlab.measures import (
    DimensionTooHigh,
    VertexReport,
    balance_delta,
    delta_diameter,
    direction_matrix,
    ergodic_vertices,
    frequency_vectors,
    kappa_convergence,
    kappa_frequencies,
    pair_frequency,
    patch_frequency,
    union_patch,
    unique_ergodicity,
)
from fusionlab.ruledsl import load_catalog, parse_rule


SINGLE_A = ConcretePatch(1, 0, ((0, (0,)),), ((1,), (1,)))


@pytest.fixture
def fibonacci():
    return load_catalog("fibonacci_1d")


@pytest.fixture
def two_measures():
    return load_catalog("two_measures")


def alpha(N: int) -> Fraction:
    result = Fraction(1)
    for k in range(1, N + 1):
        result *= Fraction(10 ** k - 1, 10 ** k + 1)
    return result


def test_direction_matrix(fibonacci):
    """
    Columns are normalized by volume.
    """
    matrix = direction_matrix(fibonacci, 0, 1)
    assert matrix.columns == ((Fraction(1, 2), Fraction(1, 2)), (1, 0))
    assert delta_diameter(fibonacci, 0, 1) == 1
    with pytest.raises(LevelOutOfRange):
        direction_matrix(fibonacci, 2, 2)


def test_balance_delta(fibonacci, two_measures):
    """
    delta_n is the worst min/max ratio over the columns of M_{n-1,n}.
    """
    assert balance_delta(fibonacci, 1) == 0
    assert balance_delta(two_measures, 2) == Fraction(1, 100)
    with pytest.raises(LevelOutOfRange):
        balance_delta(fibonacci, 0)


def test_kappa_frequencies_fibonacci(fibonacci):
    """
    The frequencies from P_N(a) are ratios of Fibonacci numbers.
    """
    vector = kappa_frequencies(fibonacci, "a", 0, 5)
    assert vector.level == 0
    assert vector.horizon == 5
    assert vector.values == (Fraction(8, 13), Fraction(5, 13))
    assert vector.as_floats() == pytest.approx((8 / 13, 5 / 13))
    with pytest.raises(LevelOutOfRange):
        kappa_frequencies(fibonacci, "z", 0, 5)
    with pytest.raises(LevelOutOfRange):
        kappa_frequencies(fibonacci, ["a", "b"], 0, 5)


def test_two_measures_alpha(two_measures):
    """
    The a-frequency of P_N(a) is exactly (1 + alpha_N)/2.
    """
    for N in range(1, 5):
        vector = kappa_frequencies(two_measures, "a", 0, N)
        assert vector.values[0] == (1 + alpha(N)) / 2
        assert delta_diameter(two_measures, 0, N) == 2 * alpha(N)


def test_kappa_convergence(fibonacci):
    """
    Successive frequency vectors get closer.
    """
    steps = kappa_convergence(fibonacci, "a", 0, [4, 6, 8, 10])
    assert steps[0][2] is None
    gaps = [gap for _, _, gap in steps[1:]]
    assert gaps == sorted(gaps, reverse=True)
    assert steps[-1][1].values[0] == Fraction(89, 144)


def test_three_letter_kappa_average():
    """
    The c column sits next to the midpoint of the a and b columns, and the
    offset shrinks by 2 * 10^n + 2 at every level.
    """
    rule = load_catalog("three_letter_kappa")
    rho = {k: kappa_frequencies(rule, k, 0, 2).values for k in "abc"}
    offset = [
        rho["c"][i] - (rho["a"][i] + rho["b"][i]) / 2 for i in range(3)
    ]
    assert offset == [
        Fraction(-1, 2 * 4444),
        Fraction(-1, 2 * 4444),
        Fraction(1, 4444),
    ]


def test_fibonacci_is_uniquely_ergodic(fibonacci):
    """
    Two steps at a time the matrices are positive and bounded.
    """
    verdict = unique_ergodicity(fibonacci, 4)
    assert verdict.status == constants.UNIQUELY_ERGODIC
    assert verdict.clause == "bounded-strongly-primitive"
    assert verdict.certificate["step"] == 2
    assert verdict.certificate["bound"] == 2


def test_two_measures_not_uniquely_ergodic(two_measures):
    """
    The level 0 diameters settle near 1.6, far from zero.
    """
    verdict = unique_ergodicity(two_measures, 4)
    assert verdict.status == constants.NOT_UNIQUELY_ERGODIC
    assert verdict.clause == "diameter-floor"
    assert verdict.certificate["floor"] == pytest.approx(1.6, abs=0.01)
    assert verdict.certificate["columns"] == ["a", "b"]
    assert verdict.certificate["diameters"][0] == pytest.approx(18 / 11)


def test_unique_ergodicity_inconclusive():
    """
    Too few levels to extrapolate.
    """
    rule = parse_rule(
        "dim 1\ntile a len 1\ntile b len 1\n"
        "level 1: a -> a a b ; b -> b b a\n"
    )
    verdict = unique_ergodicity(rule, 4)
    assert verdict.status == constants.INCONCLUSIVE
    assert verdict.certificate["floor"] is None


def test_patch_frequency(fibonacci):
    """
    The partial sums for a single tile are its exact frequency.
    """
    rho = frequency_vectors(fibonacci, "a", [2, 3, 4], 12)
    result = patch_frequency(fibonacci, rho, SINGLE_A, [2, 3, 4])
    assert result.levels == [2, 3, 4]
    assert result.sums == [Fraction(233, 377)] * 3
    assert result.gaps == [0.0, 0.0]
    assert result.last == pytest.approx(233 / 377)


def test_union_patch():
    """
    Overlapping copies must agree tile by tile.
    """
    both = union_patch(SINGLE_A, (1,))
    assert both.tiles == ((0, (0,)), (0, (1,)))
    ab = ConcretePatch(1, 0, ((0, (0,)), (1, (1,))), ((1,), (1,)))
    assert union_patch(ab, (1,)) is None


def test_pair_frequency(fibonacci):
    """
    aa is rarer than a twice over; ab clashing with itself has frequency 0.
    """
    rho = frequency_vectors(fibonacci, "a", [3, 4], 10)
    result = pair_frequency(fibonacci, rho, SINGLE_A, (1,), [3, 4])
    assert len(result.ratios) == 2
    assert all(0 < ratio < 1 for ratio in result.ratios)
    ab = ConcretePatch(1, 0, ((0, (0,)), (1, (1,))), ((1,), (1,)))
    clash = pair_frequency(fibonacci, rho, ab, (1,), [3, 4])
    assert clash.pair.sums == [0, 0]


def test_ergodic_vertices_two_measures(two_measures):
    """
    Both columns are vertices and stay apart.
    """
    report = ergodic_vertices(two_measures, 0, 3)
    assert report.vertices == ["a", "b"]
    assert report.persisting == ["a", "b"]
    assert report.margins["a"] > 1


def test_ergodic_vertices_collapse():
    """
    The c column is a vertex whose margin collapses onto the a-b edge.
    """
    rule = load_catalog("three_letter_kappa")
    early = ergodic_vertices(rule, 0, 2)
    assert early.vertices == ["a", "b", "c"]
    assert early.persisting == ["a", "b", "c"]
    late = ergodic_vertices(rule, 0, 4)
    assert "c" in late.vertices
    assert late.persisting == ["a", "b"]
    assert len(late.history["c"]) == 4
    assert late.history["c"][-1] < constants.VERTEX_MARGIN_TOLERANCE


def test_ergodic_vertices_too_many_types():
    """
    The exact hull is limited to a handful of types.
    """
    labels = "abcdefghi"
    tiles = "".join(f"tile {x} len 1\n" for x in labels)
    level = " ; ".join(f"{x} -> {x}" for x in labels)
    rule = parse_rule(f"dim 1\n{tiles}level(n): {level}\n")
    with pytest.raises(DimensionTooHigh):
        ergodic_vertices(rule, 0, 1)


def test_persisting_needs_every_level():
    """
    A vertex whose margin dipped below the tolerance at an earlier N'
    does not persist, even if its margin at N is large again.
    """
    report = VertexReport(
        0,
        3,
        ["a", "b", "c"],
        {"a": 1.0, "b": 1.0, "c": 0.5},
        history={
            "a": [1.0, 1.0, 1.0],
            "b": [1.0, 1.0, 1.0],
            "c": [0.5, 0.0, 0.5],
        },
    )
    assert report.persisting == ["a", "b"]
    two_measures = ergodic_vertices(load_catalog("two_measures"), 0, 3)
    assert all(len(v) == 3 for v in two_measures.history.values())
    assert min(two_measures.history["a"]) > 0


def balanced_rule(repeat: str):
    return parse_rule(
        "dim 1\ntile a len 1\ntile b len 1\n"
        f"level(n): a -> a^({repeat}) b ; b -> b^({repeat}) a\n"
    )


def test_divergent_delta_clause():
    """
    delta_n = 1/(n + 1) fits c/n^p with p near 0.7, so the sum of delta_n
    diverges.
    """
    verdict = unique_ergodicity(balanced_rule("n + 1"), 6)
    assert verdict.status == constants.UNIQUELY_ERGODIC
    assert verdict.clause == "divergent-delta"
    assert verdict.certificate["exponent"] == pytest.approx(0.70, abs=0.01)


def test_fitted_exponent_above_one_is_not_divergent():
    """
    delta_n = 1/(20n - 1) fits p of about 1.024 over six levels, which is
    not accepted as a divergent sum.
    """
    rule = balanced_rule("20*n - 1")
    assert constants.DELTA_DIVERGENCE_EXPONENT == 1.0
    verdict = unique_ergodicity(rule, 6)
    assert verdict.clause != "divergent-delta"
    loose = unique_ergodicity(rule, 6, exponent=1.05)
    assert loose.clause == "divergent-delta"
    assert loose.certificate["exponent"] == pytest.approx(1.0236, abs=1e-3)
