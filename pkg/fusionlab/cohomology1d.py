"""
First cohomology of 1-D fusion tilings: border forcing, the
Anderson-Putnam complexes of supertiles and the direct limit of their first
cohomology groups.

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
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple
from sympy import Matrix, ZZ  # type: ignore
from sympy.matrices.normalforms import smith_normal_form  # type: ignore
from fusionlab.core import FusionRule
from fusionlab.engine import descend_word, transition_step
from fusionlab.field import Scalar
from fusionlab.ruledsl import DimensionMismatch


logger = structlog.get_logger()


#: An endpoint of a cell: (label, "start") or (label, "end").
Endpoint = Tuple[str, str]


def _require_1d(rule: FusionRule) -> None:
    if rule.dimension != 1:
        raise DimensionMismatch("Cohomology is only computed for 1-D rules.")


def _first_descendant(rule: FusionRule, N: int, kind: int, n: int) -> int:
    for level in range(N, n, -1):
        kind = rule.level(level)[kind].composition[0].child
    return kind


def _last_descendant(rule: FusionRule, N: int, kind: int, n: int) -> int:
    for level in range(N, n, -1):
        kind = rule.level(level)[kind].composition[-1].child
    return kind


@dataclass
class BorderForcing:
    level: int
    max_level: int
    forced_at: Optional[int] = None
    #: For each N-supertile label, the flanking n-supertile labels seen.
    contexts: Dict[str, List[Tuple[str, str]]] = field(default_factory=dict)

    @property
    def forced(self) -> bool:
        return self.forced_at is not None


def _contexts(rule: FusionRule, n: int, N: int) -> Dict[int, Set[Tuple]]:
    """
    For each N-supertile type, the (left, right) n-supertiles next to its
    occurrences inside the (N+2)-supertiles.
    """
    last = [_last_descendant(rule, N, k, n) for k in range(rule.count(N))]
    first = [_first_descendant(rule, N, k, n) for k in range(rule.count(N))]
    seen: Dict[int, Set[Tuple]] = defaultdict(set)
    for j in range(rule.count(N + 2)):
        word = descend_word(rule, N + 2, j, N)
        for index in range(1, len(word) - 1):
            seen[word[index]].add(
                (last[word[index - 1]], first[word[index + 1]])
            )
    return seen


def border_forcing_check(
    rule: FusionRule, n: int, max_level: int
) -> BorderForcing:
    """
    The least N <= max_level such that every N-supertile determines the
    n-supertiles on either side of it, judged from its occurrences inside
    (N+2)-supertiles.
    """
    _require_1d(rule)
    if rule.max_level is not None:
        max_level = min(max_level, rule.max_level - 2)
    result = BorderForcing(n, max_level)
    for N in range(n, max_level + 1):
        seen = _contexts(rule, n, N)
        if all(len(pairs) <= 1 for pairs in seen.values()):
            result.forced_at = N
            labels_N = rule.labels(N)
            labels_n = rule.labels(n)
            result.contexts = {
                labels_N[k]: sorted(
                    (labels_n[a], labels_n[b]) for a, b in pairs
                )
                for k, pairs in sorted(seen.items())
            }
            break
    logger.info(
        "Border forcing checked.",
        rule=rule.name,
        level=n,
        forced_at=result.forced_at,
    )
    return result


@dataclass
class ApComplex:
    """
    One circle segment per n-supertile type, glued at the endpoints that
    meet in admitted adjacencies. ``winding`` has a row per (n+1)-supertile
    counting how often it runs over each n-cell: the transpose of M_{n,n+1}.
    """

    level: int
    cells: List[Tuple[str, Scalar]]
    vertex_classes: List[FrozenSet[Endpoint]]
    winding: List[List[int]]

    @property
    def first_betti(self) -> int:
        return len(self.cells) - len(self.vertex_classes) + 1


def _adjacent_pairs(rule: FusionRule, n: int) -> Set[Tuple[int, int]]:
    pairs = set()
    for j in range(rule.count(n + 2)):
        word = descend_word(rule, n + 2, j, n)
        pairs.update(zip(word, word[1:]))
    return pairs


def ap_complex(rule: FusionRule, n: int) -> ApComplex:
    """
    The Anderson-Putnam complex of the n-supertiles.
    """
    _require_1d(rule)
    labels = rule.labels(n)
    parent: Dict[Endpoint, Endpoint] = {}

    def find(point: Endpoint) -> Endpoint:
        parent.setdefault(point, point)
        while parent[point] != point:
            parent[point] = parent[parent[point]]
            point = parent[point]
        return point

    for label in labels:
        find((label, "start"))
        find((label, "end"))
    for left, right in sorted(_adjacent_pairs(rule, n)):
        a = find((labels[left], "end"))
        b = find((labels[right], "start"))
        if a != b:
            parent[max(a, b)] = min(a, b)
    classes: Dict[Endpoint, Set[Endpoint]] = defaultdict(set)
    for point in list(parent):
        classes[find(point)].add(point)
    matrix = transition_step(rule, n + 1)
    winding = [list(column) for column in matrix.columns()]
    cells = [(label, rule.size(n, j)[0]) for j, label in enumerate(labels)]
    return ApComplex(
        n,
        cells,
        sorted((frozenset(c) for c in classes.values()), key=sorted),
        winding,
    )


@dataclass
class DirectLimitReport:
    """
    The pullbacks on first cohomology of the approximants, with what can be
    said about their direct limit.
    """

    matrices: List[List[List[int]]]
    determinants: List[Optional[int]]
    ranks: List[int]
    invariant_factors: List[List[int]]
    stabilized: bool
    description: str
    border_forced: bool
    recognizable: bool
    label: str = ""


_SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _group(rank: int) -> str:
    """
    ℤ, ℤ², ℤ³ ...
    """
    return "ℤ" if rank == 1 else "ℤ" + str(rank).translate(_SUPERSCRIPTS)


def _invariant_factors(matrix: Matrix) -> List[int]:
    normal = smith_normal_form(matrix, domain=ZZ)
    size = min(normal.rows, normal.cols)
    return [abs(int(normal[i, i])) for i in range(size) if normal[i, i] != 0]


def h1_direct_limit(rule: FusionRule, horizon: int) -> DirectLimitReport:
    """
    The direct limit of the first cohomology of the approximants under the
    pullbacks of the forgetful maps, for levels 1..horizon. When every
    pullback is square with determinant +1 or -1 the limit is Z^j. Without
    border forcing the report is labeled as informational only.
    """
    _require_1d(rule)
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    matrices = []
    determinants: List[Optional[int]] = []
    ranks = []
    factors = []
    stop = last if rule.max_level is None else last - 1
    for n in range(1, stop):
        winding = ap_complex(rule, n).winding
        matrix = Matrix(winding)
        matrices.append(winding)
        ranks.append(int(matrix.rank()))
        if matrix.rows == matrix.cols:
            determinants.append(int(matrix.det()))
        else:
            determinants.append(None)
        factors.append(_invariant_factors(matrix))
    unimodular = bool(determinants) and all(
        d is not None and abs(d) == 1 for d in determinants
    )
    sizes = {len(m) for m in matrices}
    if unimodular and len(sizes) == 1:
        j = sizes.pop()
        description = f"{_group(j)} (stable)"
    else:
        description = (
            "direct limit of ℤ^r under non-unimodular pullbacks; see ranks "
            "and invariant factors"
        )
    forcing = border_forcing_check(rule, 1, last)
    report = DirectLimitReport(
        matrices,
        determinants,
        ranks,
        factors,
        unimodular,
        description,
        forcing.forced,
        rule.asserted_recognizable,
    )
    if not forcing.forced:
        report.label = "pre-collaring, informational only"
    logger.info(
        "First cohomology computed.",
        rule=rule.name,
        description=description,
        forced=forcing.forced,
    )
    return report
