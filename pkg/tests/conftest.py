import numpy as np
import pytest

from prondet import build_inventory, make_posteriorgram


@pytest.fixture
def tiny_inventory():
    """3 content phonemes plus the reserved labels (width 6)."""
    return build_inventory(["a", "b", "c", "pause", "eos", "blank"])


@pytest.fixture
def ab_inventory():
    """2 content phonemes: a, b (width 5)."""
    return build_inventory(["a", "b", "pause", "eos", "blank"])


def random_posteriorgram(inventory, n_frames, rng):
    """Random row-stochastic matrix over the inventory."""
    raw = rng.random((n_frames, inventory.width)) + 1e-3
    return make_posteriorgram(raw / raw.sum(axis=1, keepdims=True), inventory)
