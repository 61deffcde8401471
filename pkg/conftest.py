"""
Shared fixtures for the rackforge test suites.
"""

from pathlib import Path

import pytest

from rackforge.algebra.leibniz import LeibnizAlgebra
from rackforge.cli.io import build_algebra, build_augmentation, build_model, read_algebra_file
from rackforge.models.integration_models import IntegrationConfig

FIXTURES = Path(__file__).parent / "rackforge" / "fixtures"

VALID_FIXTURES = [
    "abelian_dim1",
    "abelian_dim2",
    "abelian_dim3",
    "leibniz_dim2",
    "affine_line",
    "heisenberg",
    "e2_type",
    "unipotent_heisenberg",
    "hemisemidirect_dim2",
    "hemisemidirect_heisenberg",
    "hemisemidirect_e2",
    "hemisemidirect_affine",
]


def fixture_path(name: str) -> str:
    return str(FIXTURES / f"{name}.json")


def load_fixture(name: str):
    """(file spec, algebra) for a bundled fixture."""
    spec, _ = read_algebra_file(fixture_path(name))
    return spec, build_algebra(spec, name)


def fixture_expected(name: str) -> dict:
    """Reference values stored with a bundled fixture."""
    spec, _ = read_algebra_file(fixture_path(name))
    return spec.expected or {}


def load_algebra(name: str) -> LeibnizAlgebra:
    return load_fixture(name)[1]


def load_augmentation(name: str):
    spec, _ = read_algebra_file(fixture_path(name))
    return build_augmentation(spec, name)


def fixture_model(name: str):
    spec, alg = load_fixture(name)
    return build_model(spec, alg)


@pytest.fixture
def cfg() -> IntegrationConfig:
    return IntegrationConfig()


@pytest.fixture
def heisenberg() -> LeibnizAlgebra:
    return load_algebra("heisenberg")


@pytest.fixture
def e2_algebra() -> LeibnizAlgebra:
    return load_algebra("e2_type")


@pytest.fixture
def affine_line() -> LeibnizAlgebra:
    return load_algebra("affine_line")


@pytest.fixture
def leibniz_dim2() -> LeibnizAlgebra:
    return load_algebra("leibniz_dim2")


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    monkeypatch.delenv("RACKFORGE_SEED", raising=False)
    monkeypatch.delenv("RACKFORGE_CONFIG", raising=False)
