"""
The fusion rule language: a lexer and parser (built with sly), the node
types they produce, the interpreter that turns them into FusionRule objects
and the built-in catalog.
"""
from .lexer import RuleSyntaxError  # noqa
from .interpreter import (  # noqa
    BadParam,
    DimensionMismatch,
    UndefinedSymbol,
    parse_alpha,
    parse_rule,
    print_rule,
)
from .catalog import (  # noqa
    UnknownCatalogEntry,
    catalog_names,
    catalog_source,
    load_catalog,
)
