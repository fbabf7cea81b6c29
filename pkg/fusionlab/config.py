"""
Configuration read from the environment.

Values may also be placed in a ``.env`` file in the current working directory
(loaded with python-dotenv). Every setting is read when it is needed, so a
changed environment takes effect without re-importing anything.

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
import os
from dotenv import load_dotenv  # type: ignore
from fusionlab import constants
from fusionlab.core import ConfigError  # noqa


load_dotenv()


def _positive_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw.strip().replace("_", ""))
    except ValueError:
        raise ConfigError(f"{name} must be a whole number (got {raw!r}).")
    if value < 1:
        raise ConfigError(f"{name} must be positive (got {value}).")
    return value


def expansion_cap() -> int:
    """
    The largest number of tiles an explicit expansion may produce.
    """
    return _positive_int(constants.ENV_CAP, constants.DEFAULT_CAP)


def bit_bound() -> int:
    """
    The largest bit length any generator expression may evaluate to.
    """
    return _positive_int(constants.ENV_BIT_BOUND, constants.DEFAULT_BIT_BOUND)


def horizon() -> int:
    """
    The default number of levels analyses look at.
    """
    return _positive_int(constants.ENV_HORIZON, constants.DEFAULT_HORIZON)


def log_level() -> str:
    return os.environ.get(constants.ENV_LOG_LEVEL, constants.DEFAULT_LOG_LEVEL)
