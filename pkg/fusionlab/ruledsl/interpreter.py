"""
Turn parsed rule files into FusionRule objects, and print rules back out.
"""
import structlog  # type: ignore
import sympy  # type: ignore
from fractions import Fraction
from tokenize import TokenError
from typing import Dict, List, Tuple
from fusionlab.core import (
    FusionLabError,
    FusionRule,
    InvalidChildIndex,
    LayoutMismatch,
    LevelTemplate,
    Prototile,
)
from fusionlab.field import QuadraticNumber, Scalar, normalize
from .lexer import FuseLexer, RuleSyntaxError
from .parser import FuseParser
from .nodes import (
    Dim,
    Grid,
    LevelDecl,
    Power,
    Recognizable,
    Repeat,
    SubstDecl,
    Tile,
    Word,
    format_scalar,
)


logger = structlog.get_logger()


class UndefinedSymbol(FusionLabError):
    """
    A name is used that no statement of the rule file declares.
    """

    pass


class DimensionMismatch(FusionLabError):
    """
    Geometry that does not fit the declared dimension, or a 2-D layout whose
    rows do not line up.
    """

    pass


class BadParam(FusionLabError):
    """
    A parameter value that cannot be used.
    """

    pass


def parse_statements(source: str) -> List:
    """
    Tokenize and parse the source, returning the statement nodes.
    """
    lexer = FuseLexer()
    parser = FuseParser(source)
    return parser.parse(lexer.tokenize(source)) or []


def _substitution(decl: SubstDecl) -> Dict[str, Tuple[Tuple[str, int], ...]]:
    images = {}
    for letter, body, lineno in decl.productions:
        if not isinstance(body, Word) or any(
            not isinstance(item, Repeat) for item in body.items
        ):
            raise RuleSyntaxError(
                f"substitution '{decl.name}' images must be plain words",
                lineno,
            )
        runs: List[List] = []
        for item in body.items:
            if item.count is not None and item.count.variables():
                raise UndefinedSymbol(
                    f"Line {lineno}: substitution exponents cannot use "
                    f"'{item.count.variables()[0]}'."
                )
            count = 1 if item.count is None else item.count.evaluate(0, 64)
            if count < 1:
                raise RuleSyntaxError(
                    f"repeat count of '{item.name}' must be positive", lineno
                )
            if runs and runs[-1][0] == item.name:
                runs[-1][1] += count
            else:
                runs.append([item.name, count])
        images[letter] = tuple((name, count) for name, count in runs)
    for letter, word in images.items():
        for name, _ in word:
            if name not in images:
                raise UndefinedSymbol(
                    f"Line {decl.lineno}: substitution '{decl.name}' maps "
                    f"'{letter}' to '{name}', which it does not define."
                )
    return images


def build_rule(statements, name: str = "rule") -> FusionRule:
    """
    Check the statements of a rule file and assemble the FusionRule.
    """
    dims = [s for s in statements if isinstance(s, Dim)]
    if not dims:
        raise RuleSyntaxError("missing 'dim' statement", 1, 1, ("dim",))
    if len(dims) > 1:
        raise RuleSyntaxError("'dim' given twice", dims[1].lineno)
    dimension = dims[0].value
    if dimension not in (1, 2):
        raise DimensionMismatch(
            f"Line {dims[0].lineno}: only dimensions 1 and 2 are supported."
        )
    prototiles: List[Prototile] = []
    for statement in statements:
        if isinstance(statement, Tile):
            if len(statement.size) != dimension:
                raise DimensionMismatch(
                    f"Line {statement.lineno}: tile '{statement.label}' needs "
                    f"{dimension} side length(s)."
                )
            if any(p.label == statement.label for p in prototiles):
                raise RuleSyntaxError(
                    f"tile '{statement.label}' declared twice",
                    statement.lineno,
                )
            size = tuple(normalize(side) for side in statement.size)
            prototiles.append(
                Prototile(len(prototiles), statement.label, size)
            )
    if not prototiles:
        raise RuleSyntaxError(
            "a rule needs at least one tile", 1, 1, ("tile",)
        )
    substitutions = {
        s.name: _substitution(s)
        for s in statements
        if isinstance(s, SubstDecl)
    }
    levels = [s for s in statements if isinstance(s, LevelDecl)]
    if not levels:
        raise RuleSyntaxError(
            "a rule needs at least one level", 1, 1, ("level",)
        )
    known = {p.label for p in prototiles}
    for decl in levels:
        known.update(label for label, _, _ in decl.productions)
    templates = []
    for decl in levels:
        _check_level(decl, dimension, known, substitutions)
        templates.append(
            LevelTemplate(
                first=decl.first,
                parametric=decl.parametric,
                productions=tuple(
                    (label, body) for label, body, _ in decl.productions
                ),
                variable=decl.variable or "",
            )
        )
    explicit = [t.first for t in templates if not t.parametric]
    if len(set(explicit)) != len(explicit):
        raise RuleSyntaxError("an explicit level is declared twice", 1)
    if any(first < 1 for first in [t.first for t in templates]):
        raise RuleSyntaxError("levels start at 1", 1)
    recognizable = [s.value for s in statements if isinstance(s, Recognizable)]
    rule = FusionRule(
        dimension,
        prototiles,
        templates,
        substitutions,
        asserted_recognizable=bool(recognizable and recognizable[-1]),
        name=name,
    )
    _check_first_level(rule)
    return rule


def _check_level(decl: LevelDecl, dimension, known, substitutions) -> None:
    labels = [label for label, _, _ in decl.productions]
    if len(set(labels)) != len(labels):
        raise RuleSyntaxError("duplicate supertile label", decl.lineno)
    for label, body, lineno in decl.productions:
        if dimension == 1 and not isinstance(body, Word):
            raise DimensionMismatch(
                f"Line {lineno}: '{label}' uses a 2-D layout in a 1-D rule."
            )
        if dimension == 2 and isinstance(body, Word):
            raise DimensionMismatch(
                f"Line {lineno}: '{label}' needs a [row / row] layout."
            )
        if isinstance(body, Grid):
            for row in body.rows:
                if any(isinstance(item, Power) for item in row):
                    raise DimensionMismatch(
                        f"Line {lineno}: substitution powers cannot be "
                        "used in 2-D rows."
                    )
        for name in body.names():
            if name not in known:
                raise UndefinedSymbol(f"Line {lineno}: unknown name '{name}'.")
        for variable in body.variables():
            if variable != decl.variable:
                raise UndefinedSymbol(
                    f"Line {lineno}: unknown variable '{variable}'."
                )
        items = body.items if isinstance(body, Word) else ()
        for item in items:
            if isinstance(item, Power):
                sigma = substitutions.get(item.substitution)
                if sigma is None:
                    raise UndefinedSymbol(
                        f"Line {lineno}: unknown substitution "
                        f"'{item.substitution}'."
                    )
                if item.letter not in sigma:
                    raise UndefinedSymbol(
                        f"Line {lineno}: '{item.substitution}' has no image "
                        f"for '{item.letter}'."
                    )


def _check_first_level(rule: FusionRule) -> None:
    """
    Level 1 is built from the declared prototiles, so names and 2-D layouts
    can be checked now rather than on first use.
    """
    try:
        rule.template_for(1)
    except FusionLabError:
        return
    try:
        rule.level(1)
    except LayoutMismatch as ex:
        raise DimensionMismatch(str(ex))
    except InvalidChildIndex as ex:
        raise UndefinedSymbol(str(ex))
    except FusionLabError:
        # Reported by validation, at the level where it happens.
        pass


def parse_rule(source: str, name: str = "rule") -> FusionRule:
    """
    Parse rule file source into a FusionRule.
    """
    rule = build_rule(parse_statements(source), name)
    logger.info(
        "Parsed rule.",
        rule=name,
        dimension=rule.dimension,
        prototiles=len(rule.prototiles),
        templates=len(rule.templates),
    )
    return rule


def _format_word(word) -> str:
    return " ".join(
        name if count == 1 else f"{name}^{count}" for name, count in word
    )


def print_rule(rule: FusionRule) -> str:
    """
    The canonical source of a parsed rule. Parsing the result gives back an
    equivalent rule, and printing that gives back the same text.
    """
    lines = [f"dim {rule.dimension}"]
    for p in rule.prototiles:
        if rule.dimension == 1:
            lines.append(f"tile {p.label} len {format_scalar(p.size[0])}")
        else:
            width, height = (format_scalar(side) for side in p.size)
            lines.append(f"tile {p.label} size {width} x {height}")
    for subst_name in sorted(rule.substitutions):
        images = rule.substitutions[subst_name]
        body = " ; ".join(
            f"{letter} -> {_format_word(images[letter])}"
            for letter in sorted(images)
        )
        lines.append(f"subst {subst_name}: {body}")
    for template in sorted(
        rule.templates, key=lambda t: (t.parametric, t.first)
    ):
        body = " ; ".join(
            f"{label} -> {production}"
            for label, production in template.productions
        )
        if template.parametric:
            head = f"level({template.variable})"
            if template.first != 1:
                head += f" from {template.first}"
        else:
            head = f"level {template.first}"
        lines.append(f"{head}: {body}")
    lines.append(
        "recognizable " + ("yes" if rule.asserted_recognizable else "no")
    )
    return "\n".join(lines) + "\n"


def parse_int_expr(text: str):
    """
    Parse an integer expression in the level variable ``n`` (as used in
    ``a^(...)``), returning its node.
    """
    source = f"dim 1\ntile a len 1\nlevel(n): a -> a^({text})\n"
    try:
        statements = parse_statements(source)
    except RuleSyntaxError as ex:
        raise BadParam(f"Cannot read {text!r} as an expression in n: {ex}")
    level = [s for s in statements if isinstance(s, LevelDecl)][0]
    body = level.productions[0][1]
    expression = body.items[0].count
    unknown = [v for v in expression.variables() if v != "n"]
    if unknown:
        raise BadParam(f"Unknown variable '{unknown[0]}' in {text!r}.")
    return expression


_PHI_SYMBOL = sympy.Symbol("phi")


def _field_element(expression) -> Scalar:
    """
    Reduce a sympy expression in phi to p + q*phi with rational p and q.
    """
    expression = sympy.expand(
        expression.subs(sympy.sqrt(5), 2 * _PHI_SYMBOL - 1)
    )
    if expression.free_symbols - {_PHI_SYMBOL}:
        raise BadParam(f"{expression} is not an element of Q(phi).")
    try:
        reduced = sympy.rem(
            sympy.Poly(expression, _PHI_SYMBOL),
            sympy.Poly(_PHI_SYMBOL ** 2 - _PHI_SYMBOL - 1, _PHI_SYMBOL),
        )
    except sympy.PolynomialError:
        raise BadParam(f"{expression} is not an element of Q(phi).")
    coefficients = reduced.all_coeffs()[::-1] + [0, 0]
    rat, phi = (sympy.sympify(c) for c in coefficients[:2])
    if not (rat.is_Rational and phi.is_Rational):
        raise BadParam(f"{expression} has non-rational coefficients.")
    value = QuadraticNumber(
        Fraction(int(rat.p), int(rat.q)), Fraction(int(phi.p), int(phi.q))
    )
    return normalize(value)


def parse_alpha(text: str) -> Tuple[Scalar, ...]:
    """
    Parse an eigenvalue candidate such as ``"(1/3, 0)"`` or
    ``"(1/5)*(2*phi - 1)"`` into a tuple of exact field elements.
    """
    try:
        parsed = sympy.parse_expr(
            text.replace("φ", "phi"),
            local_dict={"phi": _PHI_SYMBOL},
            evaluate=True,
        )
    except (SyntaxError, TokenError, TypeError, sympy.SympifyError) as ex:
        raise BadParam(f"Cannot parse {text!r}: {ex}")
    if isinstance(parsed, (tuple, sympy.Tuple)):
        components = list(parsed)
    else:
        components = [parsed]
    return tuple(_field_element(sympy.sympify(c)) for c in components)
