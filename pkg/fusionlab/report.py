"""
Canonical JSON reports.

Everything an analysis returns (verdicts, dataclasses, exact scalars,
matrices) is turned into plain JSON values here. Key order is sorted, rationals
print as "p/q" and golden field elements as ``{"rat": "p/q", "phi": "p/q"}``,
so the same inputs always produce the same bytes.

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
import dataclasses
import hashlib
import json
import math
import numbers
from fractions import Fraction
from typing import Any, Dict, Mapping, Optional
from fusionlab import __version__, constants
from fusionlab.core import FusionRule
from fusionlab.field import QuadraticNumber, as_json
from fusionlab.ruledsl import print_rule


def camel(name: str) -> str:
    """
    failed_level -> failedLevel
    """
    head, *rest = name.split("_")
    return head + "".join(part.capitalize() for part in rest)


def _key(key: Any) -> str:
    if isinstance(key, str):
        return key
    if isinstance(key, tuple):
        return ",".join(_key(k) for k in key)
    converted = to_jsonable(key)
    return converted if isinstance(converted, str) else json.dumps(converted)


def to_jsonable(value: Any) -> Any:
    """
    Convert value into something json.dumps accepts without losing exact
    information. Dataclass fields become camelCase keys and sets come out
    sorted.
    """
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (Fraction, QuadraticNumber)):
        return as_json(value)
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        number = float(value)
        if math.isfinite(number):
            return number
        # "inf" and "nan" are not JSON.
        return str(number)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            camel(f.name): to_jsonable(getattr(value, f.name))
            for f in dataclasses.fields(value)
        }
    if isinstance(value, Mapping):
        return {_key(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        items = [to_jsonable(v) for v in value]
        return sorted(items, key=lambda item: json.dumps(item, sort_keys=True))
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    raise TypeError(f"Cannot put {type(value).__name__} into a report.")


def rule_hash(rule: FusionRule) -> str:
    """
    SHA-256 digest of the canonical print of the rule.
    """
    text = print_rule(rule)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_report(
    command: str,
    parameters: Mapping[str, Any],
    results: Mapping[str, Any],
    rule: Optional[FusionRule] = None,
) -> Dict[str, Any]:
    report: Dict[str, Any] = {
        "schema": constants.REPORT_SCHEMA,
        "toolVersion": __version__,
        "command": command,
        "parameters": to_jsonable(parameters),
        "results": to_jsonable(results),
    }
    if rule is not None:
        report["rule"] = rule.name
        report["ruleHash"] = rule_hash(rule)
        report["recognizable"] = rule.asserted_recognizable
    return report


def dumps(report: Any) -> str:
    """
    The canonical UTF-8 JSON text of a report (or of any value to_jsonable
    accepts).
    """
    return json.dumps(
        to_jsonable(report),
        sort_keys=True,
        ensure_ascii=False,
        indent=2,
        separators=(",", ": "),
    )
