"""
The core data model: prototiles, supertiles, fusion rules, transition matrices
and concrete patches.

A fusion rule lists, for every level n >= 1, the n-supertiles as finite
assemblies of (n-1)-supertiles. Level 0 is the set of prototiles. Levels are
generated lazily from templates (see the ruledsl package) and memoized, so the
same rule object can be shared freely.

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
import threading
import structlog  # type: ignore
from dataclasses import dataclass, field
from typing import (
    Any,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
    Protocol,
)
from fusionlab.field import Scalar, normalize


logger = structlog.get_logger()


class FusionLabError(Exception):
    """
    Base class for every error raised by fusion-lab.
    """

    pass


class ConfigError(FusionLabError, ValueError):
    """
    An environment variable holds a value that cannot be used.
    """

    pass


class GeneratorEval(FusionLabError):
    """
    A level generator could not be evaluated (non-positive repeat count,
    a value over the bit bound, an empty composition and so on).
    """

    def __init__(self, message: str, level: Optional[int] = None) -> None:
        self.level = level
        if level is not None:
            message = f"Level {level}: {message}"
        super().__init__(message)


class LayoutMismatch(GeneratorEval):
    """
    The children of a 2-D grid layout do not fit together.
    """

    pass


class InvalidChildIndex(FusionLabError):
    """
    A composition refers to a child that does not exist at the level below.
    """

    pass


class LevelOutOfRange(FusionLabError):
    """
    A level beyond the last one an explicit rule defines was requested.
    """

    pass


@dataclass(frozen=True)
class Prototile:
    index: int
    label: str
    size: Tuple[Scalar, ...]

    @property
    def dimension(self) -> int:
        return len(self.size)


@dataclass(frozen=True)
class Run:
    """
    ``count`` consecutive copies of the child with the given index (1-D).
    """

    child: int
    count: int


@dataclass(frozen=True)
class Placement:
    """
    A child placed with its lower-left corner at (x, y) (2-D).
    """

    child: int
    x: Scalar
    y: Scalar


Composition = Tuple[Union[Run, Placement], ...]


@dataclass(frozen=True)
class SupertileDef:
    """
    An n-supertile: its composition in (n-1)-supertiles, its exact size and
    the population vector (how many children of each type it contains).
    """

    level: int
    index: int
    label: str
    composition: Composition
    size: Tuple[Scalar, ...]
    population: Tuple[int, ...]
    volume: Scalar

    @property
    def child_count(self) -> int:
        return sum(self.population)

    def children(self) -> List[int]:
        """
        The child indices in order, with runs expanded.
        """
        result: List[int] = []
        for item in self.composition:
            if isinstance(item, Run):
                result.extend([item.child] * item.count)
            else:
                result.append(item.child)
        return result


@dataclass(frozen=True)
class TransitionMatrix:
    """
    M_{source,target}: entry (i, j) counts the source-level supertiles of type
    i inside the target-level supertile of type j.
    """

    source: int
    target: int
    entries: Tuple[Tuple[int, ...], ...]

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def is_positive(self) -> bool:
        return all(value > 0 for row in self.entries for value in row)

    def max_entry(self) -> int:
        return max(value for row in self.entries for value in row)

    def support(self) -> Tuple[Tuple[bool, ...], ...]:
        return tuple(tuple(value > 0 for value in row) for row in self.entries)


@dataclass(frozen=True)
class ConcretePatch:
    """
    A finite patch of level-``level`` supertiles placed in the plane (or on
    the line). Each tile is (kind, position); ``sizes`` gives the exact size
    of each kind.
    """

    dimension: int
    level: int
    tiles: Tuple[Tuple[int, Tuple[Scalar, ...]], ...]
    sizes: Tuple[Tuple[Scalar, ...], ...]

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def kinds(self) -> Tuple[int, ...]:
        return tuple(kind for kind, _ in self.tiles)

    def occupancy(self) -> Dict[Tuple[Scalar, ...], int]:
        return {position: kind for kind, position in self.tiles}

    def translate(self, offset: Tuple[Scalar, ...]) -> "ConcretePatch":
        moved = tuple(
            (
                kind,
                tuple(normalize(p + o) for p, o in zip(position, offset)),
            )
            for kind, position in self.tiles
        )
        return ConcretePatch(self.dimension, self.level, moved, self.sizes)


@dataclass
class Verdict:
    """
    The outcome of a three valued analysis: a status label, the name of the
    sufficient condition (or failure clause) that decided it, and a mapping
    with the supporting evidence.
    """

    status: str
    clause: str
    certificate: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Violation:
    level: int
    supertile: str
    message: str


class Body(Protocol):  # pragma: no cover
    """
    Anything that can produce the composition of a supertile at a level.
    """

    def compose(self, context: "ComposeContext") -> Composition:
        ...


@dataclass(frozen=True)
class LevelTemplate:
    """
    The productions for a single explicit level (``parametric`` is False) or
    for every level from ``first`` onwards.
    """

    first: int
    parametric: bool
    productions: Tuple[Tuple[str, Any], ...]
    variable: str = ""

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.productions)


class ComposeContext:
    """
    What a Body may look at while composing a level-``level`` supertile: the
    supertiles of the level below, the declared substitutions and the bit
    bound.
    """

    def __init__(
        self,
        rule: "FusionRule",
        level: int,
        previous: Sequence[str],
        sizes: Sequence[Tuple[Scalar, ...]],
    ) -> None:
        self.rule = rule
        self.level = level
        self.previous = tuple(previous)
        self.sizes = tuple(sizes)
        self.indices = {label: i for i, label in enumerate(self.previous)}
        self.bit_bound = rule.bit_bound

    def child(self, label: str) -> int:
        try:
            return self.indices[label]
        except KeyError:
            raise InvalidChildIndex(
                f"Level {self.level}: no supertile '{label}' at level "
                f"{self.level - 1} (have {', '.join(self.previous)})."
            )

    def child_size(self, index: int) -> Tuple[Scalar, ...]:
        return self.sizes[index]

    def check_bits(self, value: int) -> int:
        if abs(value).bit_length() > self.bit_bound:
            raise GeneratorEval(
                f"value exceeds the {self.bit_bound} bit bound.", self.level
            )
        return value

    def substitute(
        self, name: str, power: int, letter: str
    ) -> Tuple[Tuple[str, int], ...]:
        return self.rule.substitute(name, power, letter)


class FusionRule:
    """
    A fusion rule in dimension 1 or 2.

    ``templates`` hold the generators of the levels, ``substitutions`` the
    letter substitutions that bodies may iterate (each maps a letter to a
    run-length encoded word). Subclasses may override ``_build_level``.
    """

    def __init__(
        self,
        dimension: int,
        prototiles: Sequence[Prototile],
        templates: Sequence[LevelTemplate] = (),
        substitutions: Optional[
            Mapping[str, Mapping[str, Tuple[Tuple[str, int], ...]]]
        ] = None,
        asserted_recognizable: bool = False,
        name: str = "rule",
    ) -> None:
        self.dimension = dimension
        self.prototiles = tuple(prototiles)
        self.templates = tuple(templates)
        self.substitutions = dict(substitutions or {})
        self.asserted_recognizable = asserted_recognizable
        self.name = name
        from fusionlab import config

        self.bit_bound = config.bit_bound()
        self._levels: Dict[int, Tuple[SupertileDef, ...]] = {}
        self._words: Dict[Tuple[str, int, str], Tuple[Tuple[str, int], ...]]
        self._words = {}
        self._lock = threading.RLock()

    def __repr__(self) -> str:
        return f"<FusionRule {self.name} dim={self.dimension}>"

    @property
    def max_level(self) -> Optional[int]:
        """
        The last level this rule defines, or None if it defines every level.
        """
        if any(t.parametric for t in self.templates):
            return None
        return max((t.first for t in self.templates), default=0)

    def template_for(self, n: int) -> LevelTemplate:
        explicit = [t for t in self.templates if not t.parametric]
        for template in explicit:
            if template.first == n:
                return template
        candidates = [
            t for t in self.templates if t.parametric and t.first <= n
        ]
        if not candidates:
            raise LevelOutOfRange(f"{self.name} does not define level {n}.")
        return max(candidates, key=lambda t: t.first)

    def labels(self, n: int) -> Tuple[str, ...]:
        if n == 0:
            return tuple(p.label for p in self.prototiles)
        return tuple(s.label for s in self.level(n))

    def count(self, n: int) -> int:
        """
        j_n, the number of n-supertile types.
        """
        return len(self.labels(n))

    def size(self, n: int, j: int) -> Tuple[Scalar, ...]:
        if n == 0:
            return self.prototiles[j].size
        return self.level(n)[j].size

    def volume(self, n: int, j: int) -> Scalar:
        if n == 0:
            result: Scalar = 1
            for side in self.prototiles[j].size:
                result = result * side
            return normalize(result)
        return self.level(n)[j].volume

    def level(self, n: int) -> Tuple[SupertileDef, ...]:
        """
        The n-supertiles (n >= 1), generated on first use and then memoized.
        """
        if n < 1:
            raise LevelOutOfRange("Supertile levels start at 1.")
        cached = self._levels.get(n)
        if cached is not None:
            return cached
        with self._lock:
            for k in range(1, n + 1):
                if k not in self._levels:
                    self._levels[k] = self._build_level(k)
                    logger.debug(
                        "Materialized level.",
                        rule=self.name,
                        level=k,
                        count=len(self._levels[k]),
                    )
            return self._levels[n]

    def _previous(self, n: int) -> Tuple[Tuple[str, ...], List[Tuple]]:
        labels = self.labels(n - 1)
        sizes = [self.size(n - 1, j) for j in range(len(labels))]
        return labels, sizes

    def _build_level(self, n: int) -> Tuple[SupertileDef, ...]:
        template = self.template_for(n)
        previous, sizes = self._previous(n)
        context = ComposeContext(self, n, previous, sizes)
        result = []
        for index, (label, body) in enumerate(template.productions):
            composition = tuple(body.compose(context))
            result.append(self.make_supertile(n, index, label, composition))
        return tuple(result)

    def make_supertile(
        self, n: int, index: int, label: str, composition: Composition
    ) -> SupertileDef:
        """
        Wrap a composition over level n-1 into a SupertileDef, working out its
        population, volume and size.
        """
        if not composition:
            raise GeneratorEval(f"'{label}' has an empty composition.", n)
        expected = Run if self.dimension == 1 else Placement
        if not all(isinstance(item, expected) for item in composition):
            raise GeneratorEval(
                f"'{label}' mixes layouts of the wrong dimension.", n
            )
        j_prev = self.count(n - 1)
        population = [0] * j_prev
        volume: Scalar = 0
        for item in composition:
            if not 0 <= item.child < j_prev:
                raise InvalidChildIndex(
                    f"Level {n}: '{label}' uses child {item.child} but level "
                    f"{n - 1} has {j_prev} supertiles."
                )
            count = item.count if isinstance(item, Run) else 1
            if count < 1:
                raise GeneratorEval(f"'{label}' has an empty run.", n)
            population[item.child] += count
            volume = volume + count * self.volume(n - 1, item.child)
        if self.dimension == 1:
            length: Scalar = 0
            for item in composition:
                length = length + item.count * self.size(n - 1, item.child)[0]
            size: Tuple[Scalar, ...] = (normalize(length),)
        else:
            size, composition = self._normalize_placements(n, composition)
        return SupertileDef(
            level=n,
            index=index,
            label=label,
            composition=composition,
            size=size,
            population=tuple(population),
            volume=normalize(volume),
        )

    def _normalize_placements(self, n: int, composition: Composition):
        xs0 = min(p.x for p in composition)
        ys0 = min(p.y for p in composition)
        xs1 = max(p.x + self.size(n - 1, p.child)[0] for p in composition)
        ys1 = max(p.y + self.size(n - 1, p.child)[1] for p in composition)
        moved = tuple(
            Placement(p.child, normalize(p.x - xs0), normalize(p.y - ys0))
            for p in composition
        )
        return (normalize(xs1 - xs0), normalize(ys1 - ys0)), moved

    def substitute(
        self, name: str, power: int, letter: str
    ) -> Tuple[Tuple[str, int], ...]:
        """
        The run-length encoded word sigma^power(letter) for the substitution
        called ``name``. Words are memoized per power.
        """
        key = (name, power, letter)
        cached = self._words.get(key)
        if cached is not None:
            return cached
        try:
            sigma = self.substitutions[name]
        except KeyError:
            raise GeneratorEval(f"Unknown substitution '{name}'.")
        if letter not in sigma:
            raise GeneratorEval(
                f"Substitution '{name}' has no image for '{letter}'."
            )
        if power < 0:
            raise GeneratorEval(f"Negative power of substitution '{name}'.")
        if power == 0:
            word: Tuple[Tuple[str, int], ...] = ((letter, 1),)
        else:
            from fusionlab import config

            cap = config.expansion_cap()
            runs: List[List[Any]] = []
            total = 0
            for symbol, count in self.substitute(name, power - 1, letter):
                image = sigma[symbol]
                if len(image) == 1:
                    repeats = [(image[0][0], image[0][1] * count)]
                else:
                    repeats = list(image) * count
                for symbol_out, count_out in repeats:
                    total += count_out
                    if runs and runs[-1][0] == symbol_out:
                        runs[-1][1] += count_out
                    else:
                        runs.append([symbol_out, count_out])
                if total > cap:
                    raise GeneratorEval(
                        f"{name}^{power}({letter}) is longer than {cap}."
                    )
            word = tuple((s, c) for s, c in runs)
        with self._lock:
            self._words[key] = word
        return word


def materialize_level(rule: FusionRule, n: int) -> Tuple[SupertileDef, ...]:
    """
    The n-supertiles of the rule. Deterministic and memoized.
    """
    return rule.level(n)


def volume(rule: FusionRule, n: int, j: int) -> Scalar:
    """
    Vol(P_n(j)), exact and computed as the sum of its children's volumes.
    """
    return rule.volume(n, j)


def _overlaps(
    rects: List[Tuple[Scalar, Scalar, Scalar, Scalar]]
) -> Optional[Tuple[int, int]]:
    """
    Sweep over rectangles (x0, y0, x1, y1) sorted by x0 and return the first
    pair with overlapping interiors, if any.
    """
    order = sorted(range(len(rects)), key=lambda i: rects[i][0])
    active: List[int] = []
    for i in order:
        x0, y0, x1, y1 = rects[i]
        active = [k for k in active if rects[k][2] > x0]
        for k in active:
            if rects[k][1] < y1 and y0 < rects[k][3]:
                return k, i
        active.append(i)
    return None


def _check_supertile(rule: FusionRule, s: SupertileDef) -> List[str]:
    problems = []
    n = s.level
    if rule.dimension == 1:
        length: Scalar = 0
        for item in s.composition:
            if not isinstance(item, Run):
                problems.append("1-D composition holds a placement.")
                continue
            length = length + item.count * rule.size(n - 1, item.child)[0]
        if normalize(length) != s.size[0]:
            problems.append("children do not fill the supertile's length.")
        if s.volume != s.size[0]:
            problems.append("volume differs from length.")
        return problems
    rects = []
    area: Scalar = 0
    for item in s.composition:
        if not isinstance(item, Placement):
            problems.append("2-D composition holds a run.")
            continue
        w, h = rule.size(n - 1, item.child)
        rects.append((item.x, item.y, item.x + w, item.y + h))
        area = area + w * h
    width, height = s.size
    if normalize(area) != normalize(width * height):
        problems.append("children do not exactly cover the bounding box.")
    clash = _overlaps(rects)
    if clash is not None:
        problems.append(f"children {clash[0]} and {clash[1]} overlap.")
    if normalize(s.volume) != normalize(width * height):
        problems.append("volume differs from area.")
    return problems


def validate(rule: FusionRule, horizon: int) -> List[Violation]:
    """
    Check levels 1..horizon of the rule and return every problem found (an
    empty list means the rule passed). Generator failures are reported as a
    violation at the level where they happened rather than raised.
    """
    violations: List[Violation] = []
    for p in rule.prototiles:
        if len(p.size) != rule.dimension:
            violations.append(
                Violation(0, p.label, "prototile has the wrong dimension.")
            )
        elif any(side <= 0 for side in p.size):
            violations.append(
                Violation(0, p.label, "prototile size must be positive.")
            )
    if not rule.prototiles:
        violations.append(Violation(0, "", "rule has no prototiles."))
        return violations
    last = horizon if rule.max_level is None else min(horizon, rule.max_level)
    for n in range(1, last + 1):
        try:
            supertiles = rule.level(n)
            rebuilt = rule._build_level(n)
        except (FusionLabError, ArithmeticError) as ex:
            violations.append(Violation(n, "", str(ex)))
            break
        if not supertiles:
            violations.append(Violation(n, "", "level has no supertiles."))
            break
        labels = [s.label for s in supertiles]
        if len(set(labels)) != len(labels):
            violations.append(Violation(n, "", "duplicate supertile labels."))
        if rebuilt != supertiles:
            violations.append(
                Violation(n, "", "level generator is not deterministic.")
            )
        for s in supertiles:
            for problem in _check_supertile(rule, s):
                violations.append(Violation(n, s.label, problem))
    logger.info(
        "Validated rule.",
        rule=rule.name,
        horizon=horizon,
        violations=len(violations),
    )
    return violations
