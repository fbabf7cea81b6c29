"""
Constants used throughout the fusion-lab package.

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

#: Environment variable names.
ENV_CAP = "FUSIONLAB_CAP"
ENV_BIT_BOUND = "FUSIONLAB_BIT_BOUND"
ENV_HORIZON = "FUSIONLAB_HORIZON"
ENV_LOG_LEVEL = "FUSIONLAB_LOG_LEVEL"

#: Default maximum number of tiles produced by an explicit expansion.
DEFAULT_CAP = 10_000_000

#: Default maximum bit length of a generator expression's value.
DEFAULT_BIT_BOUND = 4096

#: Default number of levels to validate and analyse.
DEFAULT_HORIZON = 6

#: Default log level (logs go to stderr).
DEFAULT_LOG_LEVEL = "WARNING"

#: Version of the JSON report layout.
REPORT_SCHEMA = 1

#: Exit codes used by the command line tool.
EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_CAP = 3

#: Verdict labels shared by the three valued analyses.
HOLDS = "Holds"
FAILS = "Fails"
INCONCLUSIVE = "Inconclusive"

#: Unique ergodicity.
UNIQUELY_ERGODIC = "UniquelyErgodic"
NOT_UNIQUELY_ERGODIC = "NotUniquelyErgodic"

#: Eigenvalue test.
PASS = "Pass"
FAIL = "Fail"

#: Pure point spectrum.
PURE_POINT = "PurePoint"
NOT_APPLICABLE = "NotApplicable"

#: Zero entropy bound.
ZERO_ENTROPY_BOUND_HOLDS = "ZeroEntropyBoundHolds"
SILENT = "Silent"

#: Unique ergodicity heuristics. A fitted decay exponent p of delta_n ~ c/n^p
#: no larger than this counts as a divergent sum.
DELTA_DIVERGENCE_EXPONENT = 1.0

#: Extrapolated diameter floors below this are treated as zero.
DIAMETER_FLOOR_TOLERANCE = 1e-3

#: Eigenvalue test thresholds.
ETA_FLOOR = 1e-3
ETA_DECAY_RATIO = 0.95
ETA_BURN_IN = 2
ETA_FIT_WINDOW = 4
ETA_FAIL_LEVELS = 3

#: Float readouts of exact values are compared with this tolerance.
DISPLAY_TOLERANCE = 1e-9

#: Candidate ergodic measures whose margin to the hull of the other columns
#: shrinks below this are reported as collapsing.
VERTEX_MARGIN_TOLERANCE = 1e-6

#: Largest number of supertile types handled by the exact hull computation.
MAX_HULL_TYPES = 8

#: Automatic inducing gives up after this step size.
MAX_INDUCE_STEP = 6

#: SVG pixels per unit of length.
DEFAULT_SCALE = 20
