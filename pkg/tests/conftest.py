import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import postal_vgh, toy_zip_sex_table  # noqa: E402


@pytest.fixture
def postal():
    return postal_vgh()


@pytest.fixture
def zip_sex():
    return toy_zip_sex_table()
