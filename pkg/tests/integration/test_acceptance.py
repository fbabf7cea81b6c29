"""
End to end checks of the worked examples in the catalog.
"""
from fractions import Fraction
import pytest  # type: ignore
from fusionlab import constants
from fusionlab.cohomology1d import h1_direct_limit
from fusionlab.core import ConcretePatch
from fusionlab.engine import (
    adjacency_complexity,
    perron_eigenvalue,
    primitivity,
    transition_step,
)
from fusionlab.field import PHI
from fusionlab.measures import (
    frequency_vectors,
    kappa_frequencies,
    patch_frequency,
    unique_ergodicity,
)
from fusionlab.ruledsl import load_catalog
from fusionlab.spectral import (
    agreement_fraction,
    coincidence_test,
    eigenvalue_test,
    pure_point_verdict,
    return_vectors,
)
from .fixtures import fibonacci_dpv, two_measures  # noqa


def fibonacci_number(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_two_measures(two_measures):  # noqa
    """
    The a-fraction is exactly (1 + alpha_N)/2, and the diameters never
    drop below 1.6.
    """
    alpha = Fraction(1)
    for N in range(1, 5):
        alpha *= Fraction(10 ** N - 1, 10 ** N + 1)
        vector = kappa_frequencies(two_measures, "a", 0, N)
        assert vector.values[0] == (1 + alpha) / 2
    verdict = unique_ergodicity(two_measures, 5)
    assert verdict.status == constants.NOT_UNIQUELY_ERGODIC
    assert verdict.certificate["floor"] >= 1.6
    assert all(d >= 1.6 for d in verdict.certificate["diameters"])


def test_non_ergodic_kappa():
    """
    The measure from c is the average of those from a and b.
    """
    rule = load_catalog("three_letter_kappa")
    rho = {k: kappa_frequencies(rule, k, 0, 5).as_floats() for k in "abc"}
    for i in range(3):
        average = (rho["a"][i] + rho["b"][i]) / 2
        assert rho["c"][i] == pytest.approx(average, abs=1e-6)


def test_fibonacci_direct_product(fibonacci_dpv):  # noqa
    """
    The transition matrix and the limiting frequencies
    phi^-4 (phi^2, phi, phi, 1).
    """
    assert transition_step(fibonacci_dpv, 1).entries == (
        (1, 1, 1, 1),
        (1, 0, 1, 0),
        (1, 1, 0, 0),
        (1, 0, 0, 0),
    )
    for N in (20, 24):
        vector = kappa_frequencies(fibonacci_dpv, "a", 0, N)
        assert vector.values[1] == vector.values[2]
    limit = [float(PHI ** k / PHI ** 4) for k in (2, 1, 1, 0)]
    vector = kappa_frequencies(fibonacci_dpv, "a", 0, 24)
    assert vector.as_floats() == pytest.approx(limit, abs=1e-9)
    assert limit[0] == pytest.approx(0.381966, abs=1e-6)
    rho = frequency_vectors(fibonacci_dpv, "a", [1, 2, 3], 24)
    single = ConcretePatch(2, 0, ((0, (0, 0)),), ((1, 1),) * 4)
    sums = patch_frequency(fibonacci_dpv, rho, single, [1, 2, 3]).sums
    assert [float(s) for s in sums] == pytest.approx([limit[0]] * 3, 1e-9)


def test_fibonacci_ab_frequency():
    """
    Every b follows an a, so ab is as frequent as b: 1/phi^2.
    """
    rule = load_catalog("fibonacci_1d")
    ab = ConcretePatch(1, 0, ((0, (0,)), (1, (1,))), ((1,), (1,)))
    rho = frequency_vectors(rule, "a", [4, 6, 8], 30)
    result = patch_frequency(rule, rho, ab, [4, 6, 8])
    assert result.last == pytest.approx(0.381966, abs=1e-6)


def test_direct_product_returns(fibonacci_dpv):  # noqa
    """
    (f_n, 0) and (0, f_n) are return vectors of the induced rule.
    """
    for n in range(1, 7):
        level = max(0, (n - 2) // 2)
        returns = return_vectors(fibonacci_dpv, level)
        f = fibonacci_number(n)
        assert (f, 0) in returns, n
        assert (0, f) in returns, n
    assert eigenvalue_test(fibonacci_dpv, (1, 0), 5).status == constants.PASS
    failing = eigenvalue_test(fibonacci_dpv, (Fraction(1, 3), 0), 9)
    assert failing.status == constants.FAIL
    assert failing.clause == "eta-floor"
    assert failing.certificate["eta"][2:] == [pytest.approx(3 ** 0.5)] * 7
    assert failing.certificate["levelsAboveFloor"] == list(range(2, 9))


def test_coincidence_with_unbounded_waiting():
    """
    Coincident one level up, agreement 1 - prod 10^j/(10^j + 2), and never
    pure point.
    """
    rule = load_catalog("coincidence_waiting")
    assert coincidence_test(rule, 0, 3).waiting == 1
    product = Fraction(1)
    for n in range(1, 4):
        product *= Fraction(10 ** n, 10 ** n + 2)
        assert agreement_fraction(rule, n, 0, 1) == 1 - product
    verdict = pure_point_verdict(rule, 4)
    assert verdict.status in (constants.NOT_APPLICABLE, constants.INCONCLUSIVE)


def test_chacon_certificate():
    """
    The zero pattern of Chacon's matrices is closed under multiplication.
    """
    report = primitivity(load_catalog("chacon"), 6)
    assert report.status == "NotPrimitive"
    assert report.certificate["stable"]


def test_first_cohomology():
    """
    The unimodular example has Z^2 as first cohomology.
    """
    report = h1_direct_limit(load_catalog("ap_example"), 5)
    assert all(m == [[1, 2], [2, 3]] for m in report.matrices)
    assert set(report.determinants) == {-1}
    assert report.description == "ℤ² (stable)"


def test_non_pisot_direct_product(fibonacci_dpv):  # noqa
    """
    ((1 + sqrt 13)/2)^2 as dominant eigenvalue, and adjacencies that keep
    multiplying where the Fibonacci product's stay at 12.
    """
    rule = load_catalog("nonpisot_dpv")
    assert perron_eigenvalue(transition_step(rule, 1)) == pytest.approx(
        5.3027756, abs=1e-4
    )
    counts = [adjacency_complexity(rule, n) for n in range(1, 6)]
    assert counts == sorted(set(counts))
    assert counts == [89, 160, 264, 370, 532]
    assert [adjacency_complexity(fibonacci_dpv, n) for n in range(1, 6)] == [
        12
    ] * 5
