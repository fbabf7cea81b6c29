"""
Parser for fusion rule files.

A rule file is a sequence of statements::

    dim 1
    tile a len phi
    tile b len 1
    subst s: a -> a b ; b -> a
    level 1: a -> a b ; b -> a
    level(n) from 2: a -> a^(10^n) b ; b -> s^(n)(b) a
    recognizable yes

2-D rules use ``tile a size 1 x 1`` and grid bodies ``[a b / c d]`` (rows
from the bottom) or explicit placements ``{a (0, 0) b (1, 0)}``.
"""
from fractions import Fraction
from sly import Parser  # type: ignore
from fusionlab.field import QuadraticNumber
from .lexer import FuseLexer, RuleSyntaxError, column_of
from .nodes import (
    BinaryOp,
    Dim,
    Grid,
    LevelDecl,
    Negate,
    Number,
    Placed,
    Power,
    Recognizable,
    Repeat,
    SubstDecl,
    Tile,
    Variable,
    Word,
)


class FuseParser(Parser):
    tokens = FuseLexer.tokens
    start = "statements"

    precedence = (
        ("left", "+", "-"),
        ("left", "*"),
        ("right", "UMINUS"),
        ("right", "^"),
    )

    def __init__(self, source: str = "") -> None:
        self.source = source

    # Grammar rules and actions.
    @_("statement statements")
    def statements(self, p):
        return [p.statement] + p.statements

    @_("empty")
    def statements(self, p):
        return []

    @_("DIM INT")
    def statement(self, p):
        return Dim(p.INT, p.lineno)

    @_("TILE NAME LEN scalar")
    def statement(self, p):
        return Tile(p.NAME, (p.scalar,), p.lineno)

    @_("TILE NAME SIZE scalar BY scalar")
    def statement(self, p):
        return Tile(p.NAME, (p.scalar0, p.scalar1), p.lineno)

    @_('SUBST NAME ":" productions')
    def statement(self, p):
        return SubstDecl(p.NAME, p.productions, p.lineno)

    @_('LEVEL INT ":" productions')
    def statement(self, p):
        return LevelDecl(p.INT, p.productions, None, p.lineno)

    @_('LEVEL "(" NAME ")" ":" productions')
    def statement(self, p):
        return LevelDecl(1, p.productions, p.NAME, p.lineno)

    @_('LEVEL "(" NAME ")" FROM INT ":" productions')
    def statement(self, p):
        return LevelDecl(p.INT, p.productions, p.NAME, p.lineno)

    @_("RECOGNIZABLE NAME")
    def statement(self, p):
        if p.NAME not in ("yes", "no"):
            raise RuleSyntaxError(
                f"recognizable takes yes or no, not {p.NAME!r}",
                p.lineno,
                0,
                ("yes", "no"),
            )
        return Recognizable(p.NAME == "yes", p.lineno)

    @_("production")
    def productions(self, p):
        return [p.production]

    @_('production ";"')
    def productions(self, p):
        return [p.production]

    @_('production ";" productions')
    def productions(self, p):
        return [p.production] + p.productions

    @_("NAME ARROW body")
    def production(self, p):
        return (p.NAME, p.body, p.lineno)

    @_("items")
    def body(self, p):
        return Word(p.items)

    @_('"[" rows "]"')
    def body(self, p):
        return Grid(p.rows)

    @_('"{" placements "}"')
    def body(self, p):
        return Placed(p.placements)

    @_("item")
    def items(self, p):
        return [p.item]

    @_("item items")
    def items(self, p):
        return [p.item] + p.items

    @_("items")
    def rows(self, p):
        return [p.items]

    @_('items "/" rows')
    def rows(self, p):
        return [p.items] + p.rows

    @_("NAME")
    def item(self, p):
        return Repeat(p.NAME, None, p.lineno)

    @_('NAME "^" INT')
    def item(self, p):
        return Repeat(p.NAME, Number(p.INT), p.lineno)

    @_('NAME "^" "(" expr ")"')
    def item(self, p):
        return Repeat(p.NAME, p.expr, p.lineno)

    @_('NAME "^" "(" expr ")" "(" NAME ")"')
    def item(self, p):
        return Power(p.NAME0, p.expr, p.NAME1, p.lineno)

    @_("placement")
    def placements(self, p):
        return [p.placement]

    @_("placement placements")
    def placements(self, p):
        return [p.placement] + p.placements

    @_('NAME "(" number "," number ")"')
    def placement(self, p):
        return (p.NAME, p.number0, p.number1)

    @_('expr "+" expr', 'expr "-" expr', 'expr "*" expr', 'expr "^" expr')
    def expr(self, p):
        return BinaryOp(p[1], p.expr0, p.expr1)

    @_('"-" expr %prec UMINUS')
    def expr(self, p):
        return Negate(p.expr)

    @_('"(" expr ")"')
    def expr(self, p):
        return p.expr

    @_("INT")
    def expr(self, p):
        return Number(p.INT)

    @_("NAME")
    def expr(self, p):
        return Variable(p.NAME)

    @_("INT")
    def number(self, p):
        return Fraction(p.INT)

    @_('INT "/" INT')
    def number(self, p):
        if p.INT1 == 0:
            raise RuleSyntaxError("division by zero", p.lineno, 0)
        return Fraction(p.INT0, p.INT1)

    @_("number")
    def scalar(self, p):
        return p.number

    @_("PHI")
    def scalar(self, p):
        return QuadraticNumber(0, 1)

    @_("number PHI")
    def scalar(self, p):
        return QuadraticNumber(0, p.number)

    @_('number "+" PHI')
    def scalar(self, p):
        return QuadraticNumber(p.number, 1)

    @_('number "-" PHI')
    def scalar(self, p):
        return QuadraticNumber(p.number, -1)

    @_('number "+" number PHI')
    def scalar(self, p):
        return QuadraticNumber(p.number0, p.number1)

    @_('number "-" number PHI')
    def scalar(self, p):
        return QuadraticNumber(p.number0, -p.number1)

    @_("")
    def empty(self, p):
        pass

    def expected_tokens(self):
        """
        The tokens the parser would have accepted in its current state.
        """
        try:
            actions = self._lrtable.lr_action[self.statestack[-1]]
        except (AttributeError, IndexError, KeyError):
            return ()
        return tuple(
            "end of input" if token == "$end" else token for token in actions
        )

    def error(self, p):
        expected = self.expected_tokens()
        if p is None:
            line = self.source.count("\n") + 1
            column = len(self.source) - self.source.rfind("\n")
            raise RuleSyntaxError(
                "Unexpected end of input", line, column, expected
            )
        raise RuleSyntaxError(
            f'Cannot parse {p.type} (with value "{p.value}")',
            p.lineno,
            column_of(self.source, p.index),
            expected,
        )
