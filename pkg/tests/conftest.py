import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gamesmith import parse_game, parse_strategy
from gamesmith.fixtures import lawnmower_sample_strategy_text, lawnmower_text


@pytest.fixture(scope="session")
def lawnmower():
    return parse_game(lawnmower_text())


@pytest.fixture(scope="session")
def sample_controller():
    return parse_strategy(lawnmower_sample_strategy_text())


FAST_MOW_TEXT = """\
strategy fast_mow for lawnmower
memory m00 init
memory m02
move m00 cloudy -> base
move m00 grass_cutting -> base
move m00 sunny -> cat_attack
move m00 use_fuel -> grass_cutting
move m02 cloudy -> use_fuel
move m02 grass_cutting -> base
move m02 sunny -> cat_attack
move m02 use_fuel -> grass_cutting
update m00 base -> cloudy => m00
update m00 base -> sunny => m00
update m00 cloudy -> base => m02
update m00 grass_cutting -> base => m00
update m00 sunny -> cat_attack => m00
update m00 cat_attack -> base => m00
update m00 cat_attack -> grass_cutting => m00
update m02 base -> cloudy => m02
update m02 base -> sunny => m02
update m02 cloudy -> use_fuel => m02
update m02 grass_cutting -> base => m02
update m02 sunny -> cat_attack => m02
update m02 cat_attack -> base => m02
update m02 cat_attack -> grass_cutting => m02
update m02 use_fuel -> grass_cutting => m00
"""

ALWAYS_REST_TEXT = """\
strategy always_rest for lawnmower
memory m0 init
move m0 cloudy -> base
move m0 grass_cutting -> base
move m0 sunny -> grass_cutting
move m0 use_fuel -> grass_cutting
update m0 base -> cloudy => m0
update m0 base -> sunny => m0
update m0 cloudy -> base => m0
update m0 grass_cutting -> base => m0
update m0 sunny -> grass_cutting => m0
update m0 use_fuel -> grass_cutting => m0
"""


@pytest.fixture(scope="session")
def fast_mow_controller():
    return parse_strategy(FAST_MOW_TEXT)


@pytest.fixture(scope="session")
def always_rest_controller():
    return parse_strategy(ALWAYS_REST_TEXT)
