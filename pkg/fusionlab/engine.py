"""
Transition matrices, explicit expansion of supertiles, primitivity and
inducing on a sparse sequence of levels.

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
import structlog  # type: ignore
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Set, Tuple
from sympy import Matrix  # type: ignore
from sympy.polys.matrices import DomainMatrix  # type: ignore
from fusionlab import config
from fusionlab.core import (
    ConcretePatch,
    FusionLabError,
    FusionRule,
    LevelOutOfRange,
    Placement,
    Run,
    SupertileDef,
    TransitionMatrix,
)
from fusionlab.field import normalize


logger = structlog.get_logger()


class ExpansionTooLarge(FusionLabError):
    """
    An explicit expansion would produce more tiles than the cap allows. The
    exact number of tiles it would have produced is in ``count``.
    """

    def __init__(self, count: int, cap: int) -> None:
        self.count = count
        self.cap = cap
        super().__init__(
            f"Expansion would produce {count} tiles (cap is {cap})."
        )


class HorizonTooSmall(FusionLabError):
    """
    An analysis needs more levels than the rule or the horizon provides.
    """

    pass


def _multiply(left: TransitionMatrix, right: TransitionMatrix):
    product = (
        DomainMatrix.from_Matrix(Matrix(left.entries))
        * DomainMatrix.from_Matrix(Matrix(right.entries))
    ).to_Matrix()
    return tuple(
        tuple(int(product[i, j]) for j in range(product.cols))
        for i in range(product.rows)
    )


def transition_step(rule: FusionRule, n: int) -> TransitionMatrix:
    """
    M_{n-1,n}: column j is the population of P_n(j) in (n-1)-supertiles.
    """
    supertiles = rule.level(n)
    rows = rule.count(n - 1)
    entries = tuple(
        tuple(s.population[i] for s in supertiles) for i in range(rows)
    )
    return TransitionMatrix(n - 1, n, entries)


@lru_cache(maxsize=4096)
def transition_matrix(rule: FusionRule, n: int, N: int) -> TransitionMatrix:
    """
    M_{n,N} = M_{n,n+1} M_{n+1,n+2} ... M_{N-1,N}, with exact integers.
    M_{n,n} is the identity.
    """
    if N < n:
        raise LevelOutOfRange(f"Cannot form M_{{{n},{N}}} with N < n.")
    if N == n:
        size = rule.count(n)
        identity = tuple(
            tuple(1 if i == j else 0 for j in range(size)) for i in range(size)
        )
        return TransitionMatrix(n, n, identity)
    if N == n + 1:
        return transition_step(rule, N)
    left = transition_matrix(rule, n, N - 1)
    return TransitionMatrix(n, N, _multiply(left, transition_step(rule, N)))


def population(rule: FusionRule, n: int, j: int, t: int) -> Tuple[int, ...]:
    """
    How many t-supertiles of each type make up P_n(j), without expanding.
    """
    return transition_matrix(rule, t, n).column(j)


def _check_cap(rule: FusionRule, n: int, j: int, t: int, cap) -> int:
    total = sum(population(rule, n, j, t))
    cap = config.expansion_cap() if cap is None else cap
    if total > cap:
        logger.warning(
            "Expansion refused.", rule=rule.name, level=n, count=total, cap=cap
        )
        raise ExpansionTooLarge(total, cap)
    return total


def descend_runs(
    rule: FusionRule, n: int, j: int, t: int, cap: Optional[int] = None
) -> Tuple[Tuple[int, int], ...]:
    """
    The 1-D word of t-supertiles making up P_n(j), run-length encoded as
    (kind, count) pairs.
    """
    _check_cap(rule, n, j, t, cap)
    memo: Dict[Tuple[int, int], List[List[int]]] = {}

    def runs(level: int, kind: int) -> List[List[int]]:
        if level == t:
            return [[kind, 1]]
        key = (level, kind)
        if key in memo:
            return memo[key]
        result: List[List[int]] = []
        for item in rule.level(level)[kind].composition:
            child = runs(level - 1, item.child)
            if len(child) == 1:
                pieces = [[child[0][0], child[0][1] * item.count]]
            else:
                pieces = child * item.count
            for k, c in pieces:
                if result and result[-1][0] == k:
                    result[-1][1] += c
                else:
                    result.append([k, c])
        memo[key] = result
        return result

    return tuple((k, c) for k, c in runs(n, j))


def descend_word(
    rule: FusionRule, n: int, j: int, t: int, cap: Optional[int] = None
) -> List[int]:
    """
    The 1-D word of t-supertile kinds making up P_n(j).
    """
    word: List[int] = []
    for kind, count in descend_runs(rule, n, j, t, cap):
        word.extend([kind] * count)
    return word


def descend_placements(
    rule: FusionRule, n: int, j: int, t: int, cap: Optional[int] = None
) -> List[Tuple[int, object, object]]:
    """
    The t-supertiles making up the 2-D supertile P_n(j) as (kind, x, y)
    with P_n(j)'s lower-left corner at the origin.
    """
    _check_cap(rule, n, j, t, cap)
    memo: Dict[Tuple[int, int], List[Tuple[int, object, object]]] = {}

    def place(level: int, kind: int):
        if level == t:
            return [(kind, 0, 0)]
        key = (level, kind)
        if key in memo:
            return memo[key]
        result = []
        for item in rule.level(level)[kind].composition:
            for k, x, y in place(level - 1, item.child):
                result.append((k, x + item.x, y + item.y))
        memo[key] = result
        return result

    return [(k, normalize(x), normalize(y)) for k, x, y in place(n, j)]


def expand(
    rule: FusionRule, n: int, j: int, t: int = 0, cap: Optional[int] = None
) -> ConcretePatch:
    """
    Expand P_n(j) down to level t (prototiles by default). Raises
    ExpansionTooLarge, carrying the exact tile count, when the result would
    exceed the cap.
    """
    if not 0 <= t <= n:
        raise LevelOutOfRange(f"Cannot expand level {n} down to level {t}.")
    sizes = tuple(rule.size(t, k) for k in range(rule.count(t)))
    if rule.dimension == 1:
        tiles = []
        position = 0
        for kind in descend_word(rule, n, j, t, cap):
            tiles.append((kind, (position,)))
            position = normalize(position + sizes[kind][0])
        result = tuple(tiles)
    else:
        result = tuple(
            (k, (x, y)) for k, x, y in descend_placements(rule, n, j, t, cap)
        )
    logger.debug(
        "Expanded supertile.", rule=rule.name, level=n, kind=j, to=t,
        tiles=len(result),
    )
    return ConcretePatch(rule.dimension, t, result, sizes)


def strong_primitivity(rule: FusionRule, horizon: int) -> Tuple[bool, ...]:
    """
    For n = 0..horizon-1, whether M_{n,n+1} has every entry positive.
    """
    return tuple(
        transition_step(rule, n + 1).is_positive() for n in range(horizon)
    )


@dataclass
class PrimitivityReport:
    """
    ``witnesses`` maps a level n to the least N with M_{n,N} positive.
    ``certificate`` is set when a zero pattern closed under multiplication
    shows no such N exists.
    """

    horizon: int
    witnesses: Dict[int, int] = field(default_factory=dict)
    certificate: Optional[Dict] = None

    @property
    def primitive(self) -> bool:
        return self.certificate is None and bool(self.witnesses)

    @property
    def status(self) -> str:
        if self.certificate is not None:
            return "NotPrimitive"
        if len(self.witnesses) == self.horizon:
            return "Primitive"
        return "Inconclusive"


def _boolean_closure(pattern: List[List[bool]]) -> List[List[bool]]:
    size = len(pattern)
    closure = [row[:] for row in pattern]
    changed = True
    while changed:
        changed = False
        for i in range(size):
            for j in range(size):
                if closure[i][j]:
                    continue
                if any(closure[i][k] and pattern[k][j] for k in range(size)):
                    closure[i][j] = True
                    changed = True
    return closure


def primitivity(rule: FusionRule, horizon: int) -> PrimitivityReport:
    """
    Look for primitivity witnesses for every level n < horizon, searching
    N = n+1 .. n+horizon. When some level has none, try to certify that none
    exists: if every sampled step has the same support S and the transitive
    closure of S still has a zero entry, every product M_{n,N} has that zero
    too.
    """
    last = rule.max_level
    levels = horizon if last is None else min(horizon, last)
    report = PrimitivityReport(levels)
    for n in range(levels):
        current = None
        top = n + horizon if last is None else min(n + horizon, last)
        for N in range(n + 1, top + 1):
            step = transition_step(rule, N)
            if current is None:
                current = step
            else:
                current = TransitionMatrix(n, N, _multiply(current, step))
            if current.is_positive():
                report.witnesses[n] = N
                break
    missing = [n for n in range(levels) if n not in report.witnesses]
    if missing and last is None:
        n = missing[0]
        supports = [
            transition_step(rule, m).support()
            for m in range(n + 1, n + horizon + 1)
        ]
        sizes = {len(s) for s in supports} | {len(s[0]) for s in supports}
        if len(sizes) == 1:
            size = sizes.pop()
            pattern = [
                [any(s[i][j] for s in supports) for j in range(size)]
                for i in range(size)
            ]
            closure = _boolean_closure(pattern)
            zeros = [
                (i, j)
                for i in range(size)
                for j in range(size)
                if not closure[i][j]
            ]
            stable = all(s == supports[0] for s in supports)
            if zeros and stable:
                i, j = zeros[0]
                labels = rule.labels(n)
                report.certificate = {
                    "level": n,
                    "zero": [labels[i], labels[j]],
                    "pattern": [[int(v) for v in row] for row in closure],
                    "stable": stable,
                }
    logger.info(
        "Primitivity checked.",
        rule=rule.name,
        horizon=horizon,
        witnesses=len(report.witnesses),
        certified=report.certificate is not None,
    )
    return report


class InducedRule(FusionRule):
    """
    The fusion rule induced on the levels ``level_map(0) = 0 <
    level_map(1) < ...`` of ``base``: its level k is level level_map(k) of
    the base rule, composed of level level_map(k-1) supertiles.
    """

    def __init__(
        self,
        base: FusionRule,
        levels: Optional[Sequence[int]] = None,
        step: Optional[int] = None,
    ) -> None:
        super().__init__(
            base.dimension,
            base.prototiles,
            (),
            base.substitutions,
            base.asserted_recognizable,
            name=f"{base.name}/induced",
        )
        self.base = base
        if levels is not None:
            levels = list(levels)
            if not levels or levels[0] != 0:
                raise LevelOutOfRange("Induced levels must start at 0.")
            if any(b <= a for a, b in zip(levels, levels[1:])):
                raise LevelOutOfRange("Induced levels must increase.")
            base_last = base.max_level
            if base_last is not None and levels[-1] > base_last:
                raise LevelOutOfRange(
                    f"{base.name} stops at level {base_last}."
                )
        elif step is None or step < 1:
            raise LevelOutOfRange("Inducing needs levels or a positive step.")
        self.levels = levels
        self.step = step

    def original_level(self, k: int) -> int:
        if self.levels is not None:
            if k >= len(self.levels):
                raise LevelOutOfRange(
                    f"Induced rule stops at level {len(self.levels) - 1}."
                )
            return self.levels[k]
        return k * self.step

    @property
    def max_level(self) -> Optional[int]:
        if self.levels is not None:
            return len(self.levels) - 1
        base_last = self.base.max_level
        return None if base_last is None else base_last // self.step

    def _build_level(self, k: int) -> Tuple[SupertileDef, ...]:
        n = self.original_level(k)
        m = self.original_level(k - 1)
        result = []
        for j, label in enumerate(self.base.labels(n)):
            if self.dimension == 1:
                composition = tuple(
                    Run(kind, count)
                    for kind, count in descend_runs(self.base, n, j, m)
                )
            else:
                composition = tuple(
                    Placement(kind, x, y)
                    for kind, x, y in descend_placements(self.base, n, j, m)
                )
            result.append(self.make_supertile(k, j, label, composition))
        return tuple(result)


def induce(rule: FusionRule, levels: Sequence[int]) -> InducedRule:
    """
    The rule induced on an explicit increasing list of levels starting at 0.
    """
    return InducedRule(rule, levels=levels)


def induce_step(rule: FusionRule, step: int) -> FusionRule:
    """
    The rule induced on levels 0, step, 2*step, ... (step 1 is the rule
    itself).
    """
    if step == 1:
        return rule
    return InducedRule(rule, step=step)


def find_induce_step(
    rule: FusionRule, horizon: int, max_step: int
) -> Optional[int]:
    """
    The least step s <= max_step such that M_{ks,(k+1)s} is positive for
    every k with (k + 1)s <= horizon, or None.
    """
    last = rule.max_level
    if last is not None:
        horizon = min(horizon, last)
    for step in range(1, max_step + 1):
        levels = horizon // step
        if levels < 1:
            return None
        if all(
            transition_matrix(rule, k * step, (k + 1) * step).is_positive()
            for k in range(levels)
        ):
            return step
    return None


def perron_eigenvalue(
    matrix: TransitionMatrix, iterations: int = 128
) -> float:
    """
    The dominant eigenvalue of a primitive square matrix, by power iteration
    on exact integers with a float readout at the end.
    """
    size = matrix.rows
    vector = [1] * size
    previous_total = size
    ratio = Fraction(0)
    for _ in range(iterations):
        vector = [
            sum(matrix.entries[i][k] * vector[k] for k in range(size))
            for i in range(size)
        ]
        total = sum(vector)
        if total == 0:
            return 0.0
        ratio = Fraction(total, previous_total)
        previous_total = total
    return float(ratio)


def _adjacencies_1d(tiles, sizes) -> Set[Tuple]:
    ordered = sorted(tiles, key=lambda t: t[1][0])
    classes = set()
    for (left, (x,)), (right, (y,)) in zip(ordered, ordered[1:]):
        if normalize(x + sizes[left][0]) == y:
            classes.add(("h", left, right, 0))
    return classes


def _adjacencies_2d(tiles, sizes) -> Set[Tuple]:
    by_left: Dict[object, List[Tuple]] = defaultdict(list)
    by_bottom: Dict[object, List[Tuple]] = defaultdict(list)
    for kind, (x, y) in tiles:
        w, h = sizes[kind]
        by_left[x].append((y, normalize(y + h), kind))
        by_bottom[y].append((x, normalize(x + w), kind))
    for column in (by_left, by_bottom):
        for key in column:
            column[key].sort()
    tops = {key: [entry[1] for entry in v] for key, v in by_left.items()}
    rights = {key: [entry[1] for entry in v] for key, v in by_bottom.items()}
    classes = set()
    for kind, (x, y) in tiles:
        w, h = sizes[kind]
        right_edge = normalize(x + w)
        neighbours = by_left.get(right_edge, [])
        index = bisect_right(tops.get(right_edge, []), y)
        while index < len(neighbours) and neighbours[index][0] < y + h:
            y0, _, other = neighbours[index]
            classes.add(("h", kind, other, normalize(y0 - y)))
            index += 1
        top_edge = normalize(y + h)
        neighbours = by_bottom.get(top_edge, [])
        index = bisect_right(rights.get(top_edge, []), x)
        while index < len(neighbours) and neighbours[index][0] < x + w:
            x0, _, other = neighbours[index]
            classes.add(("v", kind, other, normalize(x0 - x)))
            index += 1
    return classes


def adjacency_classes(
    rule: FusionRule, n: int, depth: Optional[int] = None
) -> Set[Tuple]:
    """
    The distinct adjacencies of n-supertiles, as (direction, kind, kind,
    offset along the shared edge), found in the expansions of every
    (n + depth)-supertile. The default depth is n + 2, and never less than 2.
    """
    depth = max(2, n + 2 if depth is None else depth)
    last = rule.max_level
    if last is not None:
        if last < n + 2:
            raise HorizonTooSmall(
                f"{rule.name} stops at level {last}; level {n + 2} is needed."
            )
        depth = min(depth, last - n)
    harvest = n + depth
    classes: Set[Tuple] = set()
    sizes = tuple(rule.size(n, k) for k in range(rule.count(n)))
    for j in range(rule.count(harvest)):
        patch = expand(rule, harvest, j, n)
        if rule.dimension == 1:
            classes |= _adjacencies_1d(patch.tiles, sizes)
        else:
            classes |= _adjacencies_2d(patch.tiles, sizes)
    logger.info(
        "Adjacencies harvested.",
        rule=rule.name,
        level=n,
        harvest=harvest,
        classes=len(classes),
    )
    return classes


def adjacency_complexity(
    rule: FusionRule, n: int, depth: Optional[int] = None
) -> int:
    """
    The number of distinct adjacency classes of n-supertiles.
    """
    return len(adjacency_classes(rule, n, depth))


def _sorted_1d(patch: ConcretePatch):
    return sorted(patch.tiles, key=lambda t: t[1][0])


def _contiguous(tiles, sizes) -> bool:
    return all(
        normalize(a[1][0] + sizes[a[0]][0]) == b[1][0]
        for a, b in zip(tiles, tiles[1:])
    )


def count_patch(haystack: ConcretePatch, needle: ConcretePatch) -> int:
    """
    The number of translates of ``needle`` whose tiles all occur, with the
    same kinds, in ``haystack``.
    """
    if haystack.dimension != needle.dimension:
        raise FusionLabError("Cannot match patches of different dimensions.")
    if not needle.tiles:
        return 0
    if haystack.dimension == 1:
        hay = _sorted_1d(haystack)
        pin = _sorted_1d(needle)
        if _contiguous(hay, haystack.sizes) and _contiguous(pin, needle.sizes):
            kinds = [k for k, _ in hay]
            pattern = [k for k, _ in pin]
            width = len(pattern)
            return sum(
                1
                for start in range(len(kinds) - width + 1)
                if kinds[start:start + width] == pattern
            )
    occupancy = haystack.occupancy()
    anchor_kind, anchor = needle.tiles[0]
    found = 0
    for kind, position in haystack.tiles:
        if kind != anchor_kind:
            continue
        offset = tuple(normalize(p - a) for p, a in zip(position, anchor))
        if all(
            occupancy.get(
                tuple(normalize(q + o) for q, o in zip(where, offset))
            )
            == other
            for other, where in needle.tiles
        ):
            found += 1
    return found


def van_hove_diagnostic(
    rule: FusionRule, n: int, r: Fraction
) -> Dict[str, object]:
    """
    For each n-supertile, the ratio of the volume of its r-thickened boundary
    to its volume: 2r/L in 1-D, and (2r(w + h) + 4r^2)/(wh) for a w x h
    rectangle, a rational over-estimate of the true thickening.
    """
    r = Fraction(r)
    result: Dict[str, object] = {}
    for j, label in enumerate(rule.labels(n)):
        size = rule.size(n, j)
        if r == 0:
            result[label] = 0
        elif rule.dimension == 1:
            result[label] = normalize(2 * r / size[0])
        else:
            w, h = size
            result[label] = normalize((2 * r * (w + h) + 4 * r * r) / (w * h))
    return result


def rank_bound(rule: FusionRule, horizon: int) -> Tuple[int, int]:
    """
    min j_n over the levels 1..horizon (and the level where it is reached),
    an upper bound on the rank of the tiling space.
    """
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    if last < 1:
        return rule.count(0), 0
    counts = [(rule.count(n), n) for n in range(1, last + 1)]
    return min(counts)
