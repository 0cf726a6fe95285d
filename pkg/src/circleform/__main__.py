"""python3 -m circleform: same as the circleform console script."""

import sys

from .cli import main

sys.exit(main())
