"""
Complexity and configurational entropy of fusion tilings with unit tiles.

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
import numpy  # type: ignore
import structlog  # type: ignore
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set
from numpy.lib.stride_tricks import sliding_window_view  # type: ignore
from fusionlab import constants
from fusionlab.core import FusionLabError, FusionRule, Verdict
from fusionlab.engine import descend_word, expand


logger = structlog.get_logger()


class NotUnitGeometry(FusionLabError):
    """
    Window counting needs every prototile to be a unit interval or square.
    """

    pass


@dataclass
class ComplexityProfile:
    """
    #_n for n = 1..maxn: the number of distinct windows of side n seen in
    the expansions of every supertile of the harvest level. A lower bound on
    the number of admitted windows.
    """

    dimension: int
    harvest: int
    counts: Dict[int, int] = field(default_factory=dict)
    lower_bound: bool = True


@dataclass
class EntropyEstimate:
    values: List[float]
    limit: float


def _windows_1d(words: List[bytes], n: int) -> Set[bytes]:
    found: Set[bytes] = set()
    for word in words:
        for start in range(len(word) - n + 1):
            found.add(word[start:start + n])
    return found


def _grid(patch) -> numpy.ndarray:
    width = max(position[0] + 1 for _, position in patch.tiles)
    height = max(position[1] + 1 for _, position in patch.tiles)
    grid = numpy.zeros((height, width), dtype=numpy.int16)
    for kind, (x, y) in patch.tiles:
        grid[y, x] = kind
    return grid


def _windows_2d(grids: List[numpy.ndarray], n: int) -> Set[bytes]:
    found: Set[bytes] = set()
    for grid in grids:
        if grid.shape[0] < n or grid.shape[1] < n:
            continue
        windows = sliding_window_view(grid, (n, n))
        for row in windows:
            for window in row:
                found.add(window.tobytes())
    return found


def complexity(rule: FusionRule, maxn: int, harvest: int) -> ComplexityProfile:
    """
    Count the distinct windows of side 1..maxn inside the expansions of the
    harvest-level supertiles. Raises NotUnitGeometry unless every prototile
    side is 1.
    """
    if any(side != 1 for p in rule.prototiles for side in p.size):
        raise NotUnitGeometry(f"{rule.name} does not have unit tiles.")
    profile = ComplexityProfile(rule.dimension, harvest)
    if rule.dimension == 1:
        words = [
            bytes(descend_word(rule, harvest, j, 0))
            for j in range(rule.count(harvest))
        ]
        for n in range(1, maxn + 1):
            profile.counts[n] = len(_windows_1d(words, n))
    else:
        grids = [
            _grid(expand(rule, harvest, j, 0))
            for j in range(rule.count(harvest))
        ]
        for n in range(1, maxn + 1):
            profile.counts[n] = len(_windows_2d(grids, n))
    logger.info(
        "Complexity counted.",
        rule=rule.name,
        harvest=harvest,
        maxn=maxn,
        last=profile.counts.get(maxn),
    )
    return profile


def entropy_estimate(profile: ComplexityProfile) -> EntropyEstimate:
    """
    log(#_n) / n^d for each n, and the limit found by fitting the values
    against 1/n (the intercept, never below zero).
    """
    sizes = sorted(n for n, c in profile.counts.items() if c > 0)
    values = [
        math.log(profile.counts[n]) / n ** profile.dimension for n in sizes
    ]
    if not values:
        return EntropyEstimate([], 0.0)
    if len(values) < 2:
        return EntropyEstimate(values, values[-1])
    xs = numpy.array([1.0 / n for n in sizes])
    intercept = float(numpy.polyfit(xs, numpy.array(values), 1)[1])
    return EntropyEstimate(values, max(0.0, intercept))


def _diameter(rule: FusionRule, n: int):
    if rule.dimension == 1:
        return max(rule.size(n, j)[0] for j in range(rule.count(n)))
    return max(sum(rule.size(n, j)) for j in range(rule.count(n)))


def zero_entropy_bound(
    rule: FusionRule, horizon: int, ratio: Optional[float] = None
) -> Verdict:
    """
    The sequence log(j_n) / d_n^d for n = 1..horizon, where d_n is the
    longest supertile length (1-D) or the largest w + h (2-D). When it
    decays geometrically the configurational entropy is zero; otherwise the
    bound says nothing.
    """
    ratio = constants.ETA_DECAY_RATIO if ratio is None else ratio
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    values = []
    for n in range(1, last + 1):
        d = float(_diameter(rule, n))
        values.append(math.log(rule.count(n)) / d ** rule.dimension)
    certificate: Dict = {"values": values, "diameter": "w+h"}
    if values and values[-1] == 0:
        status = constants.ZERO_ENTROPY_BOUND_HOLDS
    elif len(values) >= 2 and all(v > 0 for v in values):
        xs = numpy.arange(len(values), dtype=float)
        slope = float(numpy.polyfit(xs, numpy.log(numpy.array(values)), 1)[0])
        certificate["ratio"] = math.exp(slope)
        if math.exp(slope) <= ratio:
            status = constants.ZERO_ENTROPY_BOUND_HOLDS
        else:
            status = constants.SILENT
    else:
        status = constants.SILENT
    logger.info("Zero entropy bound.", rule=rule.name, status=status)
    return Verdict(status, "log-types-over-diameter", certificate)


def harvest_level(rule: FusionRule, maxn: int, horizon: int) -> int:
    """
    The least level, up to the horizon, at which every supertile is at least
    4 * maxn across in each direction.
    """
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    for n in range(1, last + 1):
        if all(
            min(rule.size(n, j)) >= 4 * maxn for j in range(rule.count(n))
        ):
            return n
    return last
