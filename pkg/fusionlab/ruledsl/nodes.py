"""
Node types produced by the rule file parser.

Integer expressions are evaluated at a level n. Bodies build the composition
of a supertile from the supertiles of the level below (see
``fusionlab.core.ComposeContext``). Every node prints back as rule file
source, which is how canonical printing works.
"""
from fractions import Fraction
from typing import List, Optional, Tuple
from fusionlab.core import (
    ComposeContext,
    GeneratorEval,
    LayoutMismatch,
    Placement,
    Run,
)
from fusionlab.field import QuadraticNumber, normalize


def format_number(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_scalar(value) -> str:
    value = normalize(value)
    if not isinstance(value, QuadraticNumber):
        return format_number(value)
    if value.rat == 0:
        return f"{format_number(value.phi)} phi"
    sign = "+" if value.phi > 0 else "-"
    phi = format_number(abs(value.phi))
    return f"{format_number(value.rat)} {sign} {phi} phi"


class Number:
    """
    An integer literal.
    """

    def __init__(self, value: int) -> None:
        self.value = value

    def evaluate(self, n: int, bit_bound: int) -> int:
        return self.value

    def variables(self) -> List[str]:
        return []

    def __str__(self) -> str:
        return str(self.value)

    def __repr__(self) -> str:
        return f"Number({self.value})"


class Variable:
    """
    The level variable (usually ``n``).
    """

    def __init__(self, name: str) -> None:
        self.name = name

    def evaluate(self, n: int, bit_bound: int) -> int:
        return n

    def variables(self) -> List[str]:
        return [self.name]

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f'Variable("{self.name}")'


class Negate:
    def __init__(self, operand) -> None:
        self.operand = operand

    def evaluate(self, n: int, bit_bound: int) -> int:
        return -self.operand.evaluate(n, bit_bound)

    def variables(self) -> List[str]:
        return self.operand.variables()

    def __str__(self) -> str:
        return f"-({self.operand})"

    def __repr__(self) -> str:
        return f"Negate({self.operand!r})"


class BinaryOp:
    """
    One of ``+ - * ^`` applied to two integer expressions.
    """

    def __init__(self, op: str, left, right) -> None:
        self.op = op
        self.left = left
        self.right = right

    def evaluate(self, n: int, bit_bound: int) -> int:
        left = self.left.evaluate(n, bit_bound)
        right = self.right.evaluate(n, bit_bound)
        if self.op == "+":
            result = left + right
        elif self.op == "-":
            result = left - right
        elif self.op == "*":
            result = left * right
        else:
            if right < 0:
                raise GeneratorEval(f"negative exponent in {self}.", n)
            # Refuse before computing a power that cannot fit the bound.
            bits = right * (abs(left).bit_length() - 1)
            if abs(left) > 1 and bits > bit_bound:
                raise GeneratorEval(
                    f"{self} exceeds the {bit_bound} bit bound.", n
                )
            result = left ** right
        if abs(result).bit_length() > bit_bound:
            raise GeneratorEval(
                f"{self} exceeds the {bit_bound} bit bound.", n
            )
        return result

    def variables(self) -> List[str]:
        return self.left.variables() + self.right.variables()

    def __str__(self) -> str:
        return f"({self.left} {self.op} {self.right})"

    def __repr__(self) -> str:
        return f"BinaryOp({self.op!r}, {self.left!r}, {self.right!r})"


class Repeat:
    """
    ``name`` or ``name^(count)``: consecutive copies of one child.
    """

    def __init__(self, name: str, count=None, lineno: int = 0) -> None:
        self.name = name
        self.count = count
        self.lineno = lineno

    def repeats(self, context: ComposeContext) -> int:
        if self.count is None:
            return 1
        value = context.check_bits(
            self.count.evaluate(context.level, context.bit_bound)
        )
        if value < 1:
            raise GeneratorEval(
                f"repeat count of '{self.name}' is {value}, not positive.",
                context.level,
            )
        return value

    def names(self) -> List[str]:
        return [self.name]

    def variables(self) -> List[str]:
        return self.count.variables() if self.count is not None else []

    def __str__(self) -> str:
        if self.count is None:
            return self.name
        if isinstance(self.count, (Number, BinaryOp)):
            # Binary operations print with their own parentheses.
            return f"{self.name}^{self.count}"
        return f"{self.name}^({self.count})"

    def __repr__(self) -> str:
        return f"Repeat({self.name!r}, {self.count!r})"


class Power:
    """
    ``sigma^(k)(x)``: the word obtained by applying the substitution sigma k
    times to the letter x, each letter read as a supertile of the level below.
    """

    def __init__(self, substitution: str, exponent, letter: str, lineno=0):
        self.substitution = substitution
        self.exponent = exponent
        self.letter = letter
        self.lineno = lineno

    def runs(self, context: ComposeContext) -> Tuple[Tuple[str, int], ...]:
        power = context.check_bits(
            self.exponent.evaluate(context.level, context.bit_bound)
        )
        if power < 0:
            raise GeneratorEval(
                f"negative power of '{self.substitution}'.", context.level
            )
        return context.substitute(self.substitution, power, self.letter)

    def names(self) -> List[str]:
        return [self.letter]

    def variables(self) -> List[str]:
        return self.exponent.variables()

    def __str__(self) -> str:
        return f"{self.substitution}^({self.exponent})({self.letter})"

    def __repr__(self) -> str:
        return (
            f"Power({self.substitution!r}, {self.exponent!r}, "
            f"{self.letter!r})"
        )


class Word:
    """
    A 1-D body: items laid end to end, left to right.
    """

    def __init__(self, items) -> None:
        self.items = tuple(items)

    def compose(self, context: ComposeContext):
        runs: List[List[int]] = []

        def push(child: int, count: int) -> None:
            if runs and runs[-1][0] == child:
                runs[-1][1] += count
            else:
                runs.append([child, count])

        for item in self.items:
            if isinstance(item, Power):
                for name, count in item.runs(context):
                    push(context.child(name), count)
            else:
                push(context.child(item.name), item.repeats(context))
        return tuple(Run(child, count) for child, count in runs)

    def names(self) -> List[str]:
        return [name for item in self.items for name in item.names()]

    def variables(self) -> List[str]:
        return [v for item in self.items for v in item.variables()]

    def __str__(self) -> str:
        return " ".join(str(item) for item in self.items)

    def __repr__(self) -> str:
        return f"Word({list(self.items)!r})"


class Grid:
    """
    A 2-D body: rows listed bottom to top, each row's children placed left
    to right. Children of a row share a height, and rows share a width.
    """

    def __init__(self, rows) -> None:
        self.rows = tuple(tuple(row) for row in rows)

    def compose(self, context: ComposeContext):
        placements = []
        y = 0
        width = None
        for row_number, row in enumerate(self.rows):
            x = 0
            height = None
            for item in row:
                if isinstance(item, Power):
                    raise LayoutMismatch(
                        "substitution powers are not allowed in 2-D rows.",
                        context.level,
                    )
                child = context.child(item.name)
                w, h = context.child_size(child)
                if height is None:
                    height = h
                elif h != height:
                    raise LayoutMismatch(
                        f"row {row_number + 1} mixes heights "
                        f"{height} and {h}.",
                        context.level,
                    )
                for _ in range(item.repeats(context)):
                    placements.append(
                        Placement(child, normalize(x), normalize(y))
                    )
                    x = x + w
            if width is None:
                width = x
            elif x != width:
                raise LayoutMismatch(
                    f"row {row_number + 1} is {x} wide, row 1 is {width}.",
                    context.level,
                )
            y = y + height
        return tuple(placements)

    def names(self) -> List[str]:
        return [n for row in self.rows for item in row for n in item.names()]

    def variables(self) -> List[str]:
        return [
            v for row in self.rows for item in row for v in item.variables()
        ]

    def __str__(self) -> str:
        rows = " / ".join(" ".join(str(i) for i in row) for row in self.rows)
        return f"[{rows}]"

    def __repr__(self) -> str:
        return f"Grid({list(self.rows)!r})"


class Placed:
    """
    A 2-D body with explicit lower-left corners for each child.
    """

    def __init__(self, entries) -> None:
        self.entries = tuple(entries)

    def compose(self, context: ComposeContext):
        return tuple(
            Placement(context.child(name), normalize(x), normalize(y))
            for name, x, y in self.entries
        )

    def names(self) -> List[str]:
        return [name for name, _, _ in self.entries]

    def variables(self) -> List[str]:
        return []

    def __str__(self) -> str:
        items = " ".join(
            f"{name} ({format_number(x)}, {format_number(y)})"
            for name, x, y in self.entries
        )
        return "{" + items + "}"

    def __repr__(self) -> str:
        return f"Placed({list(self.entries)!r})"


class Dim:
    def __init__(self, value: int, lineno: int = 0) -> None:
        self.value = value
        self.lineno = lineno

    def __repr__(self) -> str:
        return f"Dim({self.value})"


class Tile:
    def __init__(self, label: str, size, lineno: int = 0) -> None:
        self.label = label
        self.size = tuple(size)
        self.lineno = lineno

    def __repr__(self) -> str:
        return f"Tile({self.label!r}, {self.size!r})"


class SubstDecl:
    """
    A letter substitution: each letter maps to a Word of plain repeats.
    """

    def __init__(self, name: str, productions, lineno: int = 0) -> None:
        self.name = name
        self.productions = tuple(productions)
        self.lineno = lineno

    def __repr__(self) -> str:
        return f"SubstDecl({self.name!r}, {list(self.productions)!r})"


class LevelDecl:
    """
    The productions of one explicit level, or of every level from ``first``
    onwards when ``variable`` is given.
    """

    def __init__(
        self,
        first: int,
        productions,
        variable: Optional[str] = None,
        lineno: int = 0,
    ) -> None:
        self.first = first
        self.productions = tuple(productions)
        self.variable = variable
        self.lineno = lineno

    @property
    def parametric(self) -> bool:
        return self.variable is not None

    def __repr__(self) -> str:
        return (
            f"LevelDecl({self.first}, {list(self.productions)!r}, "
            f"{self.variable!r})"
        )


class Recognizable:
    def __init__(self, value: bool, lineno: int = 0) -> None:
        self.value = value
        self.lineno = lineno

    def __repr__(self) -> str:
        return f"Recognizable({self.value})"
