"""
Installs the fusionlab package and the fusion-lab command.

Copyright (C) 2020 Nicholas H.Tollervey (ntoll@ntoll.org).

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU Affero General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Affero General Public License for more details.

You should have received a copy of the GNU Affero General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""
import re
from setuptools import find_packages, setup  # type: ignore


with open("fusionlab/__init__.py") as init:
    version = re.search(r'__version__ = "(.+)"', init.read()).group(1)


setup(
    name="fusion-lab",
    version=version,
    description="Exact analysis of fusion tiling rules.",
    license="AGPL-3.0-or-later",
    python_requires=">=3.9",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"fusionlab.ruledsl": ["rules/*.fuse"]},
    install_requires=[
        "click",
        "mpmath",
        "numpy",
        "python-dotenv",
        "scipy",
        "sly",
        "structlog",
        "svgwrite",
        "sympy",
    ],
    entry_points={"console_scripts": ["fusion-lab=fusionlab.cli:main"]},
)
