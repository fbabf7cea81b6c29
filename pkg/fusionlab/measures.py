"""
Invariant measures of fusion tilings: direction matrices and their nested
polytopes, the balance scores delta_n, a three valued unique ergodicity
verdict, frequency vectors from a sequence of supertile labels (kappa) and
patch frequencies.

Copyright (C) 2020 Nicholas H.Tollervey (ntoll@ntoll.org).

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU Affero General Public License as
published by the Free Software Foundation, either version 3 of the
License, or (at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Affero General Public License for more details.

You should have received a copy of the GNU Affero General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>
"""
import math
import itertools
import numpy  # type: ignore
import structlog  # type: ignore
import sympy  # type: ignore
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union
from scipy.optimize import nnls  # type: ignore
from fusionlab import constants
from fusionlab.core import (
    ConcretePatch,
    FusionLabError,
    FusionRule,
    LevelOutOfRange,
    Verdict,
)
from fusionlab.engine import (
    count_patch,
    expand,
    find_induce_step,
    induce_step,
    transition_matrix,
    transition_step,
)
from fusionlab.field import (
    QuadraticNumber,
    Scalar,
    as_json,
    normalize,
    to_float,
)


logger = structlog.get_logger()


class ZeroColumn(FusionLabError):
    """
    A transition matrix column is entirely zero, so it cannot be normalized.
    """

    pass


class DimensionTooHigh(FusionLabError):
    """
    Too many supertile types for the exact convex hull computation.
    """

    pass


#: A sequence of supertile labels, one per level, or a single label used at
#: every level.
Kappa = Union[str, Sequence[str]]


@dataclass(frozen=True)
class DirectionMatrix:
    """
    D_{n,N}: the columns of M_{n,N}, each scaled so that its entries weighted
    by the volumes of the n-supertiles sum to 1.
    """

    source: int
    target: int
    columns: Tuple[Tuple[Scalar, ...], ...]


@dataclass(frozen=True)
class FrequencyVector:
    """
    rho_{n,N}: frequencies of the n-supertiles in the measure given by a
    kappa sequence, computed from the N-supertile kappa_N.
    """

    level: int
    horizon: int
    values: Tuple[Scalar, ...]

    def as_floats(self) -> Tuple[float, ...]:
        return tuple(to_float(v) for v in self.values)


@dataclass
class PatchFrequency:
    """
    Partial sums sum_i #(P in P_n(i)) rho_n(i) for increasing n, with the
    gaps between successive sums.
    """

    levels: List[int] = field(default_factory=list)
    sums: List[Scalar] = field(default_factory=list)

    @property
    def gaps(self) -> List[float]:
        values = [to_float(s) for s in self.sums]
        return [abs(b - a) for a, b in zip(values, values[1:])]

    @property
    def last(self) -> float:
        return to_float(self.sums[-1]) if self.sums else 0.0


def _scalar_div(numerator, denominator) -> Scalar:
    if isinstance(denominator, QuadraticNumber):
        return normalize(QuadraticNumber.coerce(numerator) / denominator)
    return normalize(Fraction(numerator) / denominator)


def direction_matrix(rule: FusionRule, n: int, N: int) -> DirectionMatrix:
    """
    The direction matrix D_{n,N}. Raises ZeroColumn for an all-zero column.
    """
    if N <= n:
        raise LevelOutOfRange("A direction matrix needs n < N.")
    matrix = transition_matrix(rule, n, N)
    volumes = [rule.volume(n, i) for i in range(matrix.rows)]
    columns = []
    for k, column in enumerate(matrix.columns()):
        if not any(column):
            raise ZeroColumn(
                f"Column {rule.labels(N)[k]} of M_{{{n},{N}}} is zero."
            )
        total: Scalar = 0
        for count, vol in zip(column, volumes):
            total = total + count * vol
        columns.append(tuple(_scalar_div(c, total) for c in column))
    return DirectionMatrix(n, N, tuple(columns))


def _distance(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    total: Scalar = 0
    for x, y in zip(a, b):
        total = total + abs(x - y)
    return normalize(total)


def _diameter_pair(columns) -> Tuple[Scalar, int, int]:
    best: Scalar = 0
    pair = (0, 0)
    for i, j in itertools.combinations(range(len(columns)), 2):
        d = _distance(columns[i], columns[j])
        if d > best:
            best, pair = d, (i, j)
    return best, pair[0], pair[1]


def delta_diameter(rule: FusionRule, n: int, N: int) -> Scalar:
    """
    The L1 diameter of the polytope spanned by the columns of D_{n,N}.
    """
    return _diameter_pair(direction_matrix(rule, n, N).columns)[0]


def balance_delta(rule: FusionRule, n: int) -> Fraction:
    """
    delta_n: the smallest ratio min/max over the columns of M_{n-1,n}.
    """
    if n < 1:
        raise LevelOutOfRange("delta_n is defined for n >= 1.")
    ratios = []
    for column in transition_step(rule, n).columns():
        top = max(column)
        if top == 0:
            raise ZeroColumn(f"A column of M_{{{n - 1},{n}}} is zero.")
        ratios.append(Fraction(min(column), top))
    return min(ratios)


def _bounded_clause(rule: FusionRule, horizon: int) -> Optional[Verdict]:
    """
    Bounded entries and strong primitivity, after inducing if needed.
    """
    step = find_induce_step(rule, horizon, constants.MAX_INDUCE_STEP)
    if step is None:
        return None
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    levels = last // step
    if levels < 2:
        return None
    maxima = [
        transition_matrix(rule, k * step, (k + 1) * step).max_entry()
        for k in range(levels)
    ]
    if maxima[-1] > max(maxima[:-1]):
        return None
    return Verdict(
        constants.UNIQUELY_ERGODIC,
        "bounded-strongly-primitive",
        {"step": step, "bound": max(maxima), "maxima": maxima},
    )


def _divergence_clause(
    rule: FusionRule, horizon: int, exponent: float
) -> Optional[Verdict]:
    """
    delta_n fits c/n^p with p <= exponent, so sum delta_n diverges.
    """
    step = find_induce_step(rule, horizon, constants.MAX_INDUCE_STEP) or 1
    induced = induce_step(rule, step)
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    levels = last // step
    if levels < 3:
        return None
    deltas = [balance_delta(induced, n) for n in range(1, levels + 1)]
    if any(d == 0 for d in deltas):
        return None
    xs = numpy.log(numpy.arange(1, levels + 1, dtype=float))
    ys = numpy.log(numpy.array([float(d) for d in deltas]))
    slope = float(numpy.polyfit(xs, ys, 1)[0])
    if -slope > exponent:
        return None
    return Verdict(
        constants.UNIQUELY_ERGODIC,
        "divergent-delta",
        {
            "step": step,
            "deltas": [as_json(d) for d in deltas],
            "exponent": -slope,
        },
    )


def _diameter_floor(diameters: Sequence[float]) -> Optional[float]:
    """
    Extrapolate a decreasing sequence with geometrically shrinking
    differences to its limit. None when the differences are not shrinking.
    """
    if len(diameters) < 3:
        return None
    previous = diameters[-3] - diameters[-2]
    last = diameters[-2] - diameters[-1]
    if last <= 0:
        return diameters[-1]
    if previous <= 0:
        return None
    ratio = last / previous
    if ratio >= 1:
        return None
    return diameters[-1] - last * ratio / (1 - ratio)


def unique_ergodicity(
    rule: FusionRule,
    horizon: int,
    floor_tolerance: float = constants.DIAMETER_FLOOR_TOLERANCE,
    exponent: float = constants.DELTA_DIVERGENCE_EXPONENT,
) -> Verdict:
    """
    Decide unique ergodicity at a finite horizon. The clauses are tried in
    order: bounded strongly primitive matrices (after inducing), a divergent
    sum of delta_n, and a persistent lower bound on the diameters of the
    level 0 polytopes (which shows two distinct ergodic measures). Otherwise
    the answer is Inconclusive.
    """
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    for clause in (
        lambda: _bounded_clause(rule, last),
        lambda: _divergence_clause(rule, last, exponent),
    ):
        verdict = clause()
        if verdict is not None:
            logger.info(
                "Unique ergodicity decided.",
                rule=rule.name,
                status=verdict.status,
                clause=verdict.clause,
            )
            return verdict
    diameters = []
    pair = (0, 0)
    for N in range(1, last + 1):
        columns = direction_matrix(rule, 0, N).columns
        value, i, j = _diameter_pair(columns)
        diameters.append(value)
        pair = (i, j)
    floats = [to_float(d) for d in diameters]
    floor = _diameter_floor(floats)
    certificate = {
        "level": 0,
        "diameters": floats,
        "lastDiameter": as_json(diameters[-1]) if diameters else 0,
        "floor": floor,
        "tolerance": floor_tolerance,
    }
    if floor is not None and floor > floor_tolerance:
        labels = rule.labels(last)
        certificate["columns"] = [labels[pair[0]], labels[pair[1]]]
        verdict = Verdict(
            constants.NOT_UNIQUELY_ERGODIC, "diameter-floor", certificate
        )
    else:
        verdict = Verdict(constants.INCONCLUSIVE, "none", certificate)
    logger.info(
        "Unique ergodicity decided.",
        rule=rule.name,
        status=verdict.status,
        clause=verdict.clause,
    )
    return verdict


def _kappa_index(rule: FusionRule, kappa: Kappa, N: int) -> int:
    if isinstance(kappa, str):
        label = kappa
    else:
        if N >= len(kappa):
            raise LevelOutOfRange(f"kappa has no label for level {N}.")
        label = kappa[N]
    labels = rule.labels(N)
    if label not in labels:
        raise LevelOutOfRange(f"Level {N} has no supertile '{label}'.")
    return labels.index(label)


def kappa_frequencies(
    rule: FusionRule, kappa: Kappa, n: int, N: int
) -> FrequencyVector:
    """
    rho_{n,N}(i) = M_{n,N}(i, k_N) / Vol(P_N(k_N)).
    """
    if N < n:
        raise LevelOutOfRange("kappa frequencies need n <= N.")
    k = _kappa_index(rule, kappa, N)
    column = transition_matrix(rule, n, N).column(k)
    vol = rule.volume(N, k)
    return FrequencyVector(n, N, tuple(_scalar_div(c, vol) for c in column))


def kappa_convergence(
    rule: FusionRule, kappa: Kappa, n: int, horizons: Sequence[int]
) -> List[Tuple[int, FrequencyVector, Optional[float]]]:
    """
    rho_{n,N} for each N in ``horizons`` with the L1 gap to the previous one.
    """
    result: List[Tuple[int, FrequencyVector, Optional[float]]] = []
    previous: Optional[FrequencyVector] = None
    for N in horizons:
        vector = kappa_frequencies(rule, kappa, n, N)
        gap = None
        if previous is not None:
            gap = to_float(_distance(vector.values, previous.values))
        result.append((N, vector, gap))
        previous = vector
    return result


def frequency_vectors(
    rule: FusionRule, kappa: Kappa, levels: Sequence[int], N: int
) -> Dict[int, FrequencyVector]:
    """
    rho_{n,N} for every n in ``levels``, all from the same kappa_N.
    """
    return {n: kappa_frequencies(rule, kappa, n, N) for n in levels}


def patch_frequency(
    rule: FusionRule,
    rho: Mapping[int, FrequencyVector],
    patch: ConcretePatch,
    levels: Sequence[int],
) -> PatchFrequency:
    """
    The partial sums sum_i #(P in P_n(i)) rho_n(i) for n in ``levels``.
    They converge to the frequency of the patch P in the measure.
    """
    result = PatchFrequency()
    for n in levels:
        vector = rho[n]
        total: Scalar = 0
        for i in range(rule.count(n)):
            copies = count_patch(expand(rule, n, i, patch.level), patch)
            if copies:
                total = total + copies * vector.values[i]
        result.levels.append(n)
        result.sums.append(normalize(total))
    logger.info(
        "Patch frequency computed.",
        rule=rule.name,
        tiles=len(patch),
        levels=list(levels),
        last=result.last,
    )
    return result


def union_patch(
    patch: ConcretePatch, offset: Tuple[Scalar, ...]
) -> Optional[ConcretePatch]:
    """
    P together with P + offset, or None when the two copies disagree
    about a tile.
    """
    tiles = dict((position, kind) for kind, position in patch.tiles)
    for kind, position in patch.translate(offset).tiles:
        if tiles.get(position, kind) != kind:
            return None
        tiles[position] = kind
    ordered = tuple(
        (kind, position) for position, kind in sorted(tiles.items())
    )
    return ConcretePatch(patch.dimension, patch.level, ordered, patch.sizes)


@dataclass
class PairFrequency:
    """
    The frequency of P and of P with a translate, with the ratio
    freq(P u (P + v)) / freq(P)^2 at each level.
    """

    single: PatchFrequency
    pair: PatchFrequency

    @property
    def ratios(self) -> List[float]:
        result = []
        for base, both in zip(self.single.sums, self.pair.sums):
            base_value = to_float(base)
            result.append(
                to_float(both) / base_value ** 2 if base_value else 0.0
            )
        return result


def pair_frequency(
    rule: FusionRule,
    rho: Mapping[int, FrequencyVector],
    patch: ConcretePatch,
    offset: Tuple[Scalar, ...],
    levels: Sequence[int],
) -> PairFrequency:
    """
    Frequencies of P and of P u (P + v). For a strongly mixing system the
    ratio to freq(P)^2 would tend to 1 along any sequence of long v.
    """
    single = patch_frequency(rule, rho, patch, levels)
    both = union_patch(patch, tuple(normalize(o) for o in offset))
    if both is None:
        pair = PatchFrequency(list(levels), [0] * len(levels))
    else:
        pair = patch_frequency(rule, rho, both, levels)
    return PairFrequency(single, pair)


@dataclass
class VertexReport:
    """
    The columns of D_{n,N} that are vertices of their convex hull, with the
    (float) distance of each from the hull of the other columns. ``history``
    holds a label's margin at every N' = n+1 .. N (0.0 where it was not a
    vertex).
    """

    level: int
    horizon: int
    vertices: List[str]
    margins: Dict[str, float]
    tolerance: float = constants.VERTEX_MARGIN_TOLERANCE
    history: Dict[str, List[float]] = field(default_factory=dict)

    @property
    def persisting(self) -> List[str]:
        return [
            v
            for v in self.vertices
            if min(self.history.get(v, [self.margins[v]])) >= self.tolerance
        ]


def _to_sympy(value: Scalar):
    if isinstance(value, QuadraticNumber):
        return sympy.Rational(
            value.rat.numerator, value.rat.denominator
        ) + sympy.Rational(
            value.phi.numerator, value.phi.denominator
        ) * sympy.GoldenRatio
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _in_hull(point, others) -> bool:
    """
    Exact test of whether ``point`` is a convex combination of ``others``,
    trying affinely independent subsets (Caratheodory).
    """
    size = len(point)
    target = sympy.Matrix([_to_sympy(v) for v in point] + [1])
    for r in range(1, min(len(others), size) + 1):
        for subset in itertools.combinations(others, r):
            system = sympy.Matrix(
                [[_to_sympy(c[i]) for c in subset] for i in range(size)]
                + [[1] * r]
            )
            try:
                solution, parameters = system.gauss_jordan_solve(target)
            except ValueError:
                continue
            if parameters.shape[0]:
                continue
            if all(sympy.simplify(x).is_nonnegative for x in solution):
                return True
    return False


def _margin(point, others) -> float:
    """
    Distance from ``point`` to the hull of ``others``, by non-negative least
    squares with a heavily weighted row forcing the weights to sum to 1.
    """
    if not others:
        return math.inf
    weight = 1e3
    matrix = numpy.array(
        [[to_float(c[i]) for c in others] for i in range(len(point))]
        + [[weight] * len(others)]
    )
    target = numpy.array([to_float(v) for v in point] + [weight])
    _, residual = nnls(matrix, target)
    return float(residual)


def _hull_margins(
    rule: FusionRule, n: int, N: int
) -> Tuple[List[str], Dict[str, float]]:
    columns = direction_matrix(rule, n, N).columns
    labels = rule.labels(N)
    distinct: List[Tuple[str, Tuple[Scalar, ...]]] = []
    for label, column in zip(labels, columns):
        if all(column != seen for _, seen in distinct):
            distinct.append((label, column))
    vertices = []
    margins = {}
    for index, (label, column) in enumerate(distinct):
        others = [c for k, (_, c) in enumerate(distinct) if k != index]
        if not _in_hull(column, others):
            vertices.append(label)
            margins[label] = _margin(column, others)
    return vertices, margins


def ergodic_vertices(rule: FusionRule, n: int, N: int) -> VertexReport:
    """
    The columns of D_{n,N} that are vertices of the polytope Delta_{n,N}.
    Columns whose margin stays above the tolerance at every N' = n+1 .. N
    are the candidates for ergodic measures. Raises DimensionTooHigh when
    j_n exceeds the limit.
    """
    if rule.count(n) > constants.MAX_HULL_TYPES:
        raise DimensionTooHigh(
            f"Level {n} has {rule.count(n)} supertile types; the hull is "
            f"only computed for up to {constants.MAX_HULL_TYPES}."
        )
    history: Dict[str, List[float]] = {}
    for M in range(min(n + 1, N), N + 1):
        vertices, margins = _hull_margins(rule, n, M)
        for label in rule.labels(M):
            history.setdefault(label, []).append(margins.get(label, 0.0))
    report = VertexReport(n, N, vertices, margins, history=history)
    logger.info(
        "Hull vertices found.",
        rule=rule.name,
        level=n,
        horizon=N,
        vertices=vertices,
        persisting=report.persisting,
    )
    return report
