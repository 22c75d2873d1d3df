"""Shared fixtures: the bound-state basis is expensive enough to build once."""

import pytest

from qnldyn.morse import MORSE_PRESETS, build_eigenbasis


@pytest.fixture(scope="session")
def morse_basis():
    return build_eigenbasis(MORSE_PRESETS["default"])
