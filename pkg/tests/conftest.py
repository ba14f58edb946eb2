from pathlib import Path

import pytest

from baire.graph import parse

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def load(name: str):
    return parse((SAMPLES / f"{name}.txt").read_text())


@pytest.fixture
def samples():
    return SAMPLES
