"""
The lexer for fusion rule files.
"""
from sly import Lexer  # type: ignore


class RuleSyntaxError(SyntaxError):
    """
    A rule file could not be tokenized or parsed. Carries the line, the
    column and (when known) the set of tokens that would have been accepted.
    """

    def __init__(self, message, line=0, column=0, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        text = f"Line {line}, column {column}: {message}"
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)


def column_of(text: str, index: int) -> int:
    """
    One based column of the character at ``index``.
    """
    return index - text.rfind("\n", 0, index)


class FuseLexer(Lexer):
    tokens = {
        "NAME",
        "INT",
        "ARROW",
        "DIM",
        "TILE",
        "LEN",
        "SIZE",
        "BY",
        "LEVEL",
        "FROM",
        "SUBST",
        "PHI",
        "RECOGNIZABLE",
    }

    ignore = " \t\r"
    ignore_comment = r"\#.*"

    # Simple tokens
    literals = {
        "(",
        ")",
        "[",
        "]",
        "{",
        "}",
        "/",
        ":",
        ";",
        "^",
        "+",
        "-",
        "*",
        ",",
    }

    # Complex tokens
    ARROW = r"->"

    @_(r"\d+")
    def INT(self, t):
        """
        Non-negative whole numbers.
        """
        t.value = int(t.value)
        return t

    @_(r"\n+")
    def ignore_newline(self, t):
        """
        Track line numbers.
        """
        self.lineno += t.value.count("\n")

    NAME = r"[A-Za-z_][A-Za-z0-9_']*"
    NAME["dim"] = "DIM"
    NAME["tile"] = "TILE"
    NAME["len"] = "LEN"
    NAME["size"] = "SIZE"
    NAME["x"] = "BY"
    NAME["level"] = "LEVEL"
    NAME["from"] = "FROM"
    NAME["subst"] = "SUBST"
    NAME["phi"] = "PHI"
    NAME["recognizable"] = "RECOGNIZABLE"

    def error(self, t):
        """
        Error reporting.
        """
        raise RuleSyntaxError(
            f"Bad character {t.value[0]!r}",
            self.lineno,
            column_of(self.text, t.index),
        )
