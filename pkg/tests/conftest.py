import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def construction():
    from quasicheese.construction import build_construction
    return build_construction(0.5, 1.0, 0.01)
