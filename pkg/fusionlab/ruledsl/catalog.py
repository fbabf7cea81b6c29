"""
The built-in catalog of fusion rules.

Most entries are rule files in the ``rules`` directory next to this module,
with ``$name`` placeholders for their parameters. The scrambled Fibonacci
rules are generated: their levels are explicit words worked out here.
"""
import structlog  # type: ignore
from dataclasses import dataclass, field
from pathlib import Path
from string import Template
from typing import Callable, Dict, List, Mapping, Optional, Tuple
from fusionlab.core import FusionLabError, FusionRule
from .interpreter import BadParam, parse_int_expr, parse_rule


logger = structlog.get_logger()


RULES = Path(__file__).parent / "rules"

#: Scrambled Fibonacci words longer than this are refused.
MAX_WORD = 100_000


class UnknownCatalogEntry(FusionLabError):
    """
    There is no catalog entry with the requested name.
    """

    pass


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    defaults: Dict[str, str] = field(default_factory=dict)
    choices: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    builder: Optional[Callable[[Mapping[str, str]], str]] = None


def _geometry(value: str) -> Dict[str, str]:
    return {"a_length": "phi" if value == "quadratic" else "1"}


def fibonacci_words(d: int) -> Tuple[List[str], List[str]]:
    """
    The words F^d(a) and F^d(b) for the Fibonacci substitution a -> ab,
    b -> a.
    """
    word_a, word_b = ["a"], ["b"]
    for _ in range(d):
        word_a, word_b = word_a + word_b, word_a
    return word_a, word_b


def _runs(word: List[str]) -> str:
    parts: List[List] = []
    for letter in word:
        if parts and parts[-1][0] == letter:
            parts[-1][1] += 1
        else:
            parts.append([letter, 1])
    return " ".join(
        letter if count == 1 else f"{letter}^{count}"
        for letter, count in parts
    )


def scrambled_source(params: Mapping[str, str]) -> str:
    """
    Rule file source for the accelerated and scrambled Fibonacci rules.

    The accelerated rule sets P_n(x) = F^d(x) over level n-1, with
    d = N(n) - N(n-1) > 2. The scrambled rule adds, at odd levels, a type e
    with the population of P_n(b) but all of its a's first. At even levels
    the first b of each word is replaced by e.
    """
    expression = parse_int_expr(params["N"])
    try:
        levels = int(params["levels"])
    except ValueError:
        raise BadParam(
            f"levels must be a whole number, not {params['levels']!r}"
        )
    if levels < 1:
        raise BadParam("levels must be at least 1.")
    variant = params["variant"]
    values = [expression.evaluate(n, 64) for n in range(levels + 1)]
    length = "phi" if params["geometry"] == "quadratic" else "1"
    lines = [
        f"# {variant.capitalize()} Fibonacci rule, N(n) = {params['N']}.",
        "dim 1",
        f"tile a len {length}",
        "tile b len 1",
    ]
    for n in range(1, levels + 1):
        d = values[n] - values[n - 1]
        if d <= 2:
            raise BadParam(
                f"N(n) - N(n-1) must exceed 2; it is {d} at n = {n}."
            )
        word_a, word_b = fibonacci_words(d)
        if len(word_a) > MAX_WORD:
            raise BadParam(f"Level {n} words are longer than {MAX_WORD}.")
        productions = []
        if variant == "scrambled" and n % 2 == 1:
            word_e = sorted(word_b)
            productions = [
                f"a -> {_runs(word_a)}",
                f"b -> {_runs(word_b)}",
                f"e -> {_runs(word_e)}",
            ]
        elif variant == "scrambled" and n > 1:
            for label, word in (("a", word_a), ("b", word_b)):
                word = list(word)
                word[word.index("b")] = "e"
                productions.append(f"{label} -> {_runs(word)}")
        else:
            productions = [f"a -> {_runs(word_a)}", f"b -> {_runs(word_b)}"]
        lines.append(f"level {n}: " + " ; ".join(productions))
    return "\n".join(lines) + "\n"


CATALOG: Dict[str, CatalogEntry] = {
    entry.name: entry
    for entry in [
        CatalogEntry("chacon", "Chacon's transformation: a -> aaba, b -> b."),
        CatalogEntry(
            "fibonacci_1d",
            "The Fibonacci rule a -> ab, b -> a.",
            {"geometry": "unit"},
            {"geometry": ("unit", "quadratic")},
        ),
        CatalogEntry(
            "two_measures",
            "a -> a^(10^n) b, b -> b^(10^n) a: two ergodic measures.",
        ),
        CatalogEntry(
            "three_letter_kappa",
            "Three types, two ergodic measures, c in between.",
        ),
        CatalogEntry(
            "coincidence_waiting",
            "Constant length 10^n + 2, coincident with unbounded waiting.",
        ),
        CatalogEntry(
            "three_tile_solenoid",
            "Constant length 10^n + 3 with a solenoid factor.",
        ),
        CatalogEntry(
            "scrambled_fibonacci",
            "Accelerated or scrambled Fibonacci rule F^(N(n) - N(n-1)).",
            {
                "N": "3*n",
                "levels": "8",
                "geometry": "quadratic",
                "variant": "scrambled",
            },
            {
                "geometry": ("unit", "quadratic"),
                "variant": ("scrambled", "accelerated"),
            },
            scrambled_source,
        ),
        CatalogEntry(
            "fibonacci_dpv",
            "Direct product of two Fibonacci rules on unit squares.",
        ),
        CatalogEntry(
            "nonpisot_dpv",
            "Rearranged direct product of a -> abbb, b -> a (not Pisot).",
        ),
        CatalogEntry(
            "period_doubling",
            "Period doubling a -> ab, b -> aa (does not force the border).",
        ),
        CatalogEntry(
            "border_forcing", "a -> abb, b -> abbb (forces the border)."
        ),
        CatalogEntry(
            "ap_example", "a -> abb, b -> ababb: unimodular winding matrices."
        ),
        CatalogEntry(
            "periodic",
            "One tile doubling at every level.",
            {"length": "2"},
        ),
    ]
}


def catalog_names() -> List[Tuple[str, str]]:
    """
    (name, description) for every catalog entry, sorted by name.
    """
    return sorted((e.name, e.description) for e in CATALOG.values())


def resolve_params(
    entry: CatalogEntry, params: Optional[Mapping[str, str]]
) -> Dict[str, str]:
    resolved = dict(entry.defaults)
    for key, value in (params or {}).items():
        if key not in entry.defaults:
            raise BadParam(f"{entry.name} has no parameter '{key}'.")
        choices = entry.choices.get(key)
        if choices and value not in choices:
            raise BadParam(
                f"{key} must be one of {', '.join(choices)} (got {value!r})."
            )
        resolved[key] = value
    return resolved


def catalog_source(
    name: str, params: Optional[Mapping[str, str]] = None
) -> str:
    """
    The rule file source of a catalog entry with the given parameters.
    """
    try:
        entry = CATALOG[name]
    except KeyError:
        raise UnknownCatalogEntry(
            f"No catalog entry named '{name}' "
            f"(try one of: {', '.join(sorted(CATALOG))})."
        )
    resolved = resolve_params(entry, params)
    if entry.builder is not None:
        return entry.builder(resolved)
    values = dict(resolved)
    if "geometry" in values:
        values.update(_geometry(values["geometry"]))
    template = Template((RULES / f"{name}.fuse").read_text(encoding="utf-8"))
    try:
        return template.substitute(values)
    except (KeyError, ValueError) as ex:
        raise BadParam(f"Cannot fill in {name}: {ex}")


def load_catalog(
    name: str, params: Optional[Mapping[str, str]] = None
) -> FusionRule:
    """
    Parse a catalog entry into a FusionRule named after the entry.
    """
    source = catalog_source(name, params)
    logger.info("Loading catalog rule.", name=name, params=dict(params or {}))
    return parse_rule(source, name)
