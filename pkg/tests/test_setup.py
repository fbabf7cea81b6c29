"""
Tests for the packaging metadata.

Copyright (C) 2020 Nicholas H.Tollervey
"""
import math
import re
from pathlib import Path
from fusionlab import __version__


SETUP = Path(__file__).parent.parent / "setup.py"


def test_python_requires_covers_the_standard_library_used():
    """
    math.lcm arrived in Python 3.9, so nothing older may be installed.
    """
    text = SETUP.read_text(encoding="utf-8")
    match = re.search(r'python_requires=">=3\.(\d+)"', text)
    assert match is not None
    assert int(match.group(1)) >= 9
    assert hasattr(math, "lcm")


def test_version_is_read_from_the_package():
    """
    setup.py takes its version from fusionlab.__version__.
    """
    init = Path(__file__).parent.parent / "fusionlab" / "__init__.py"
    assert f'"{__version__}"' in init.read_text(encoding="utf-8")
    assert "fusionlab/__init__.py" in SETUP.read_text(encoding="utf-8")
