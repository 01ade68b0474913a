"""Shared pytest fixtures and session-level safeguards."""

from unittest.mock import patch

import pytest

from andor_equilibrium.tree import GateKind, TreeShape


@pytest.fixture(autouse=True)
def isolated_config(tmp_path):
    """Keep tests from reading a real ~/.config/andor-equilibrium file.

    The CLI falls back to DEFAULT_CONFIG when --config is not given; point
    it at a path that does not exist so built-in defaults apply.
    """
    missing = tmp_path / "no-such-config.yaml"
    with patch("andor_equilibrium.cli.DEFAULT_CONFIG", missing):
        yield missing


@pytest.fixture
def and_or_1() -> TreeShape:
    return TreeShape(GateKind.AND, 1)


@pytest.fixture
def and_or_2() -> TreeShape:
    return TreeShape(GateKind.AND, 2)


@pytest.fixture
def or_and_2() -> TreeShape:
    return TreeShape(GateKind.OR, 2)


@pytest.fixture
def and_or_3() -> TreeShape:
    return TreeShape(GateKind.AND, 3)
