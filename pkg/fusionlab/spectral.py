"""
Spectral analysis of fusion tilings: return vectors, the eta_n(alpha)
criterion for topological eigenvalues, constant length rules, coincidences
and the pure point verdict.

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
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple
from fusionlab import config, constants
from fusionlab.core import (
    FusionLabError,
    FusionRule,
    LevelOutOfRange,
    Run,
    Verdict,
)
from fusionlab.engine import (
    expand,
    find_induce_step,
    induce_step,
    primitivity,
    transition_matrix,
    transition_step,
)
from fusionlab.field import Scalar, as_json, circle_distance, normalize
from fusionlab.ruledsl import DimensionMismatch


logger = structlog.get_logger()


#: A position or a translation, one exact coordinate per dimension.
Vector = Tuple[Scalar, ...]


class NotStronglyPrimitive(FusionLabError):
    """
    No inducing step up to the limit makes the rule strongly primitive.
    """

    pass


class NotConstantLength(FusionLabError):
    """
    The analysis needs supertiles of equal size at every level.
    """

    pass


class DifferentTypes(FusionLabError):
    """
    Two supertiles that must share a type do not.
    """

    pass


@dataclass(frozen=True)
class ReturnVectorSet:
    """
    The return vectors V^n: relative positions of two n-supertiles of the
    same type within an (n+2)-supertile. ``level`` is a level of the rule
    induced with ``step``, so it is level ``level * step`` of the original.
    """

    level: int
    step: int
    vectors: FrozenSet[Vector]

    @property
    def original_level(self) -> int:
        return self.level * self.step

    def __contains__(self, vector) -> bool:
        return tuple(normalize(v) for v in vector) in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class ConstantLengthProfile:
    """
    Whether every level has supertiles of equal volume and equal child
    count, and the child counts L_n (the solenoid is the inverse limit of
    the circle under multiplication by L_1, L_2, ...).
    """

    constant: bool
    lengths: List[int] = field(default_factory=list)
    failed_level: Optional[int] = None


def same_type_returns(rule: FusionRule, n: int, N: int) -> Set[Vector]:
    """
    Every non-zero difference of positions of two n-supertiles of the same
    type inside some N-supertile.
    """
    vectors: Set[Vector] = set()
    for j in range(rule.count(N)):
        by_kind: Dict[int, List[Vector]] = defaultdict(list)
        for kind, position in expand(rule, N, j, n).tiles:
            by_kind[kind].append(position)
        for positions in by_kind.values():
            for p in positions:
                for q in positions:
                    vectors.add(tuple(normalize(b - a) for a, b in zip(p, q)))
    vectors.discard(tuple(0 for _ in range(rule.dimension)))
    return vectors


def strongly_primitive_step(
    rule: FusionRule, horizon: Optional[int] = None
) -> int:
    """
    The least inducing step that makes the rule strongly primitive over the
    horizon. Raises NotStronglyPrimitive when there is none.
    """
    horizon = config.horizon() if horizon is None else horizon
    step = find_induce_step(rule, horizon, constants.MAX_INDUCE_STEP)
    if step is None:
        raise NotStronglyPrimitive(
            f"{rule.name} is not strongly primitive after inducing with any "
            f"step up to {constants.MAX_INDUCE_STEP}."
        )
    return step


def return_vectors(
    rule: FusionRule, n: int, horizon: Optional[int] = None
) -> ReturnVectorSet:
    """
    V^n of the rule, induced first when it is not strongly primitive. The
    level n is a level of the induced rule.
    """
    step = strongly_primitive_step(rule, horizon)
    induced = induce_step(rule, step)
    vectors = frozenset(same_type_returns(induced, n, n + 2))
    logger.info(
        "Return vectors harvested.",
        rule=rule.name,
        level=n,
        step=step,
        count=len(vectors),
    )
    return ReturnVectorSet(n, step, vectors)


def telescope_return(
    rule: FusionRule, n: int, N: int, j: int, x: int, y: int
) -> List[Vector]:
    """
    Write the difference of positions of the x-th and y-th n-supertiles of
    P_N(j) (in expansion order, both of the same type) as v_n + ... +
    v_{N-2} where each v_k is zero or a return vector of level k. The rule
    must be strongly primitive.
    """
    if N < n + 2:
        raise LevelOutOfRange("Telescoping needs N >= n + 2.")
    # nodes[k] lists (kind, position, parent index) for level k.
    nodes: Dict[int, List[Tuple[int, Vector, int]]] = {
        N: [(j, tuple(0 for _ in range(rule.dimension)), -1)]
    }
    children: Dict[int, Dict[int, List[int]]] = {}
    for level in range(N, n, -1):
        below: List[Tuple[int, Vector, int]] = []
        children[level] = defaultdict(list)
        for index, (kind, position, _) in enumerate(nodes[level]):
            supertile = rule.level(level)[kind]
            offset = 0
            for item in supertile.composition:
                count = item.count if isinstance(item, Run) else 1
                for _ in range(count):
                    if rule.dimension == 1:
                        where: Vector = (normalize(position[0] + offset),)
                        offset = normalize(
                            offset + rule.size(level - 1, item.child)[0]
                        )
                    else:
                        where = (
                            normalize(position[0] + item.x),
                            normalize(position[1] + item.y),
                        )
                    children[level][index].append(len(below))
                    below.append((item.child, where, index))
        nodes[level - 1] = below

    def sub(p: Vector, q: Vector) -> Vector:
        return tuple(normalize(b - a) for a, b in zip(p, q))

    def add(p: Vector, q: Vector) -> Vector:
        return tuple(normalize(a + b) for a, b in zip(p, q))

    a, b = x, y
    if nodes[n][a][0] != nodes[n][b][0]:
        raise DifferentTypes("Both supertiles must have the same type.")
    terms: List[Vector] = []
    for m in range(n, N - 1):
        _, pos_a, parent_a = nodes[m][a]
        _, pos_b, parent_b = nodes[m][b]
        if m == N - 2:
            terms.append(sub(pos_a, pos_b))
            break
        a_parent = nodes[m + 1][parent_a]
        b_parent = nodes[m + 1][parent_b]
        grand = b_parent[2]
        candidates = [parent_b] + [
            c for c in children[m + 2][grand] if c != parent_b
        ]
        match = next(
            (c for c in candidates if nodes[m + 1][c][0] == a_parent[0]), None
        )
        if match is None:
            raise NotStronglyPrimitive(
                f"Level {m + 2} supertile lacks a level {m + 1} supertile of "
                "every type."
            )
        copy = add(nodes[m + 1][match][1], sub(a_parent[1], pos_a))
        terms.append(sub(copy, pos_b))
        a, b = parent_a, match
    return terms


def dot(alpha: Sequence[Scalar], vector: Vector) -> Scalar:
    total: Scalar = 0
    for coefficient, coordinate in zip(alpha, vector):
        total = total + coefficient * coordinate
    return normalize(total)


def eta(
    rule: FusionRule,
    n: int,
    alpha: Sequence[Scalar],
    returns: Optional[ReturnVectorSet] = None,
) -> float:
    """
    eta_n(alpha) = max |exp(2 pi i alpha.v) - 1| over the return vectors v
    of level n. alpha.v is reduced modulo 1 exactly before evaluation.
    """
    if len(alpha) != rule.dimension:
        raise DimensionMismatch(
            f"alpha has {len(alpha)} coordinates for a "
            f"{rule.dimension}-D rule."
        )
    returns = return_vectors(rule, n) if returns is None else returns
    return max(
        (circle_distance(dot(alpha, v)) for v in returns.vectors), default=0.0
    )


def eigenvalue_test(
    rule: FusionRule, alpha: Sequence[Scalar], horizon: int
) -> Verdict:
    """
    Decide whether exp(2 pi i alpha.x) is a topological eigenvalue from
    eta_n(alpha) for n < horizon. Pass: the last values are zero or fit a
    geometric decay. Fail: eta_n stays above a floor on enough levels after
    a burn-in. Otherwise Inconclusive.
    """
    step = strongly_primitive_step(rule, horizon)
    values = []
    for n in range(horizon):
        returns = return_vectors(rule, n, horizon)
        values.append(eta(rule, n, alpha, returns))
    certificate: Dict = {
        "alpha": [as_json(a) for a in alpha],
        "eta": values,
        "step": step,
        "floor": constants.ETA_FLOOR,
        "ratioBound": constants.ETA_DECAY_RATIO,
    }
    window = values[-constants.ETA_FIT_WINDOW:]
    verdict = None
    if len(window) == constants.ETA_FIT_WINDOW:
        if all(v == 0 for v in window):
            verdict = Verdict(constants.PASS, "vanishing", certificate)
        elif all(v > 0 for v in window):
            xs = numpy.arange(len(window), dtype=float)
            slope = numpy.polyfit(xs, numpy.log(numpy.array(window)), 1)[0]
            ratio = math.exp(float(slope))
            certificate["ratio"] = ratio
            if ratio <= constants.ETA_DECAY_RATIO:
                verdict = Verdict(
                    constants.PASS, "geometric-decay", certificate
                )
    if verdict is None:
        above = [
            n
            for n, v in enumerate(values)
            if n >= constants.ETA_BURN_IN and v >= constants.ETA_FLOOR
        ]
        certificate["levelsAboveFloor"] = above
        if len(above) >= constants.ETA_FAIL_LEVELS:
            verdict = Verdict(constants.FAIL, "eta-floor", certificate)
        else:
            verdict = Verdict(constants.INCONCLUSIVE, "none", certificate)
    logger.info(
        "Eigenvalue tested.",
        rule=rule.name,
        status=verdict.status,
        clause=verdict.clause,
    )
    return verdict


def constant_length_profile(
    rule: FusionRule, horizon: Optional[int] = None
) -> ConstantLengthProfile:
    """
    Check levels 1..horizon for equal volumes and equal child counts.
    """
    horizon = config.horizon() if horizon is None else horizon
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    sizes = {p.size for p in rule.prototiles}
    if len(sizes) != 1:
        return ConstantLengthProfile(False, [], 0)
    lengths = []
    for n in range(1, last + 1):
        supertiles = rule.level(n)
        volumes = {s.volume for s in supertiles}
        counts = {s.child_count for s in supertiles}
        if len(volumes) != 1 or len(counts) != 1:
            return ConstantLengthProfile(False, lengths, n)
        lengths.append(counts.pop())
    return ConstantLengthProfile(True, lengths)


def _require_constant_length(rule: FusionRule, horizon: int) -> None:
    if rule.dimension != 1:
        raise NotConstantLength("Slot alignment is only defined in 1-D.")
    profile = constant_length_profile(rule, horizon)
    if not profile.constant:
        raise NotConstantLength(
            f"{rule.name} is not constant length "
            f"(level {profile.failed_level})."
        )


class _Agreement:
    """
    Counts the aligned level-n slots on which two N-supertiles agree,
    memoized on (level, kind, kind) and merging the run-length encoded
    compositions of the two supertiles.
    """

    def __init__(self, rule: FusionRule, n: int) -> None:
        self.rule = rule
        self.n = n
        self.memo: Dict[Tuple[int, int, int], int] = {}

    def slots(self, level: int) -> int:
        return sum(transition_matrix(self.rule, self.n, level).column(0))

    def agree(self, level: int, a: int, b: int) -> int:
        if level == self.n:
            return int(a == b)
        if a == b:
            return self.slots(level)
        key = (level, a, b)
        if key in self.memo:
            return self.memo[key]
        left = [
            [item.child, item.count]
            for item in self.rule.level(level)[a].composition
        ]
        right = [
            [item.child, item.count]
            for item in self.rule.level(level)[b].composition
        ]
        total = 0
        i = k = 0
        while i < len(left) and k < len(right):
            width = min(left[i][1], right[k][1])
            total += width * self.agree(level - 1, left[i][0], right[k][0])
            left[i][1] -= width
            right[k][1] -= width
            if left[i][1] == 0:
                i += 1
            if right[k][1] == 0:
                k += 1
        self.memo[key] = total
        return total


def agreement_fraction(
    rule: FusionRule, N: int, i: int, j: int, n: int = 0
) -> Fraction:
    """
    The exact fraction of aligned n-slots on which P_N(i) and P_N(j) agree.
    """
    _require_constant_length(rule, N)
    counter = _Agreement(rule, n)
    return Fraction(counter.agree(N, i, j), counter.slots(N))


@dataclass
class CoincidenceResult:
    level: int
    max_level: int
    coincident_at: Optional[int] = None

    @property
    def waiting(self) -> Optional[int]:
        if self.coincident_at is None:
            return None
        return self.coincident_at - self.level


def coincidence_test(
    rule: FusionRule, n: int, max_level: int
) -> CoincidenceResult:
    """
    The least N <= max_level such that every pair of N-supertiles agrees on
    at least one aligned n-supertile slot.
    """
    _require_constant_length(rule, max_level)
    counter = _Agreement(rule, n)
    result = CoincidenceResult(n, max_level)
    for N in range(n + 1, max_level + 1):
        count = rule.count(N)
        if all(
            counter.agree(N, a, b) > 0
            for a in range(count)
            for b in range(a + 1, count)
        ):
            result.coincident_at = N
            break
    logger.info(
        "Coincidence tested.",
        rule=rule.name,
        level=n,
        coincident_at=result.coincident_at,
    )
    return result


def finite_waiting(
    rule: FusionRule, levels: Sequence[int], max_gap: int = 3
) -> Optional[int]:
    """
    A waiting time k such that N = n + k is coincident for every sampled n,
    or None.
    """
    gaps = set()
    for n in levels:
        result = coincidence_test(rule, n, n + max_gap)
        if result.waiting is None:
            return None
        gaps.add(result.waiting)
    return max(gaps) if gaps else None


def _bounded(rule: FusionRule, horizon: int) -> Optional[int]:
    maxima = [
        transition_step(rule, n).max_entry() for n in range(1, horizon + 1)
    ]
    if len(maxima) < 2 or maxima[-1] > max(maxima[:-1]):
        return None
    return max(maxima)


def pure_point_verdict(rule: FusionRule, horizon: int) -> Verdict:
    """
    Check the hypotheses under which a constant length fusion has pure point
    spectrum: prototiles of one size, constant length, primitive, bounded
    transition matrices and coincidence with a finite waiting time.
    """

    def not_applicable(reason: str, **extra) -> Verdict:
        verdict = Verdict(constants.NOT_APPLICABLE, reason, dict(extra))
        logger.info("Pure point checked.", rule=rule.name, reason=reason)
        return verdict

    if rule.dimension != 1:
        return not_applicable("not one dimensional")
    if len({p.size for p in rule.prototiles}) != 1:
        return not_applicable("not prototile regular")
    profile = constant_length_profile(rule, horizon)
    if not profile.constant:
        return not_applicable("not constant length")
    report = primitivity(rule, horizon)
    if report.status != "Primitive":
        return not_applicable("not primitive")
    bound = _bounded(rule, horizon)
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    if bound is None:
        fractions = [
            as_json(agreement_fraction(rule, n, 0, 1))
            for n in range(1, min(last, 3) + 1)
            if rule.count(n) > 1
        ]
        return not_applicable("unbounded matrices", agreement=fractions)
    levels = list(range(0, max(1, last - 3)))
    k = finite_waiting(rule, levels)
    if k is None:
        verdict = Verdict(
            constants.INCONCLUSIVE, "no finite waiting", {"bound": bound}
        )
    else:
        types = max(rule.count(m) for m in range(0, last + 1))
        base = bound ** k * types ** k
        m = max(1, last // k)
        agreement = 1 - Fraction(base - 1, base) ** m
        verdict = Verdict(
            constants.PURE_POINT,
            "coincident-finite-waiting",
            {
                "bound": bound,
                "types": types,
                "waiting": k,
                "lengths": profile.lengths,
                "applications": m,
                "agreementBound": as_json(agreement),
            },
        )
    logger.info("Pure point checked.", rule=rule.name, status=verdict.status)
    return verdict
