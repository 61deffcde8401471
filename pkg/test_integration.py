"""
Tests for group models, the invariant cutoff and the pullback (dirty) rack.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fixture_expected, fixture_model, load_algebra, load_augmentation, load_fixture
from rackforge.algebra.augmented import AugmentedLeibnizAlgebra, canonical_augmentation
from rackforge.algebra.scalars import ScalarMode, as_array, matvec, to_float
from rackforge.cli.io import build_model
from rackforge.exceptions import CarrierError, ConfigError, InputError, PreconditionError
from rackforge.integration.checks import exp_chart_check, group_model_check, verify_nilradical_translation
from rackforge.integration.cutoff import invariant_cutoff, plateau
from rackforge.integration.dirty import (
    RackPoint,
    build_pullback_rack,
    fiber_dimension_check,
    integration_report,
    lie_case_reduction,
    membership_preservation_check,
    rack_product_M,
    section_equivariance_check,
    section_identity_check,
    section_s,
    tangent_check,
)
from rackforge.integration.groups import E2CoverModel, MatrixLocalModel, NilpotentBCHModel, load_model
from rackforge.models.integration_models import IntegrationConfig

MODEL_FIXTURES = ["heisenberg", "e2_type", "affine_line", "unipotent_heisenberg"]
HEMISEMIDIRECT = ["hemisemidirect_dim2", "hemisemidirect_heisenberg", "hemisemidirect_e2", "hemisemidirect_affine"]


def pullback(name: str, cfg: IntegrationConfig):
    """Dirty rack of a fixture's declared augmentation over its declared model."""
    spec, _ = load_fixture(name)
    aug = load_augmentation(name)
    return build_pullback_rack(aug, build_model(spec, aug.g), cfg)


# cutoff

def test_plateau_values():
    assert plateau(0.0, math.pi / 2, math.pi) == 1.0
    assert plateau(math.pi / 2, math.pi / 2, math.pi) == 1.0
    assert plateau(math.pi, math.pi / 2, math.pi) == 0.0
    assert plateau(4.0, math.pi / 2, math.pi) == 0.0
    assert plateau(0.9 * math.pi, math.pi / 2, math.pi) == pytest.approx(0.02298, abs=1e-4)


@given(st.floats(min_value=0, max_value=4), st.floats(min_value=0, max_value=4))
@settings(max_examples=100, deadline=None)
def test_plateau_is_monotone(a, b):
    low, high = sorted((a, b))
    assert 0.0 <= plateau(high, math.pi / 2, math.pi) <= plateau(low, math.pi / 2, math.pi) <= 1.0


def test_e2_cutoff_table(e2_algebra, cfg):
    for theta in (0.0, 0.5, math.pi / 2, -math.pi / 2):
        assert invariant_cutoff(e2_algebra, np.array([theta, 0.3, -0.2]), cfg) == 1.0
    for theta in (math.pi, -math.pi, 4.0):
        assert invariant_cutoff(e2_algebra, np.array([theta, 0.0, 0.0]), cfg) == 0.0
    middle = invariant_cutoff(e2_algebra, np.array([0.9 * math.pi, 0.0, 0.0]), cfg)
    assert 0.0 < middle < 1.0
    assert middle == pytest.approx(plateau(0.9 * math.pi, cfg.tau_prime, cfg.tau), abs=1e-9)


@pytest.mark.parametrize("name", ["heisenberg", "e2_type"])
def test_cutoff_is_ad_invariant(name, cfg):
    alg = load_algebra(name)
    model = fixture_model(name)
    rng = np.random.default_rng(5)
    for _ in range(100):
        g = model.sample(rng)
        xi = model.sample_algebra(rng)
        moved = matvec(model.Ad(g), xi)
        assert invariant_cutoff(alg, moved, cfg) == invariant_cutoff(alg, xi, cfg)


# group models

@pytest.mark.parametrize("name", MODEL_FIXTURES)
def test_group_model_contract(name, cfg):
    report = group_model_check(fixture_model(name), cfg, n_samples=64, seed=0)
    assert report.passed, report.first_failure()


@pytest.mark.parametrize("name", MODEL_FIXTURES)
def test_exp_chart(name, cfg):
    report = exp_chart_check(fixture_model(name), cfg, n_samples=64, seed=0)
    assert report.passed, report.first_failure()


def test_model_types():
    assert isinstance(fixture_model("heisenberg"), NilpotentBCHModel)
    assert isinstance(fixture_model("e2_type"), E2CoverModel)
    unipotent = fixture_model("unipotent_heisenberg")
    assert isinstance(unipotent, MatrixLocalModel)
    assert unipotent.unipotent and unipotent.exact
    assert not fixture_model("affine_line").unipotent


def test_heisenberg_bch_product(heisenberg):
    model = NilpotentBCHModel(heisenberg)
    assert model.nilpotency_class == 2
    x = as_array([1, 0, 0], ScalarMode.RATIONAL)
    y = as_array([0, 1, 0], ScalarMode.RATIONAL)
    assert list(model.multiply(x, y)) == [1, 1, Fraction(1, 2)]


def test_e2_log_domain(e2_algebra):
    model = E2CoverModel(e2_algebra)
    _, inside = model.log(model.exp(np.array([3.0, 0.5, 0.5])))
    assert inside
    _, outside = model.log(model.exp(np.array([3.5, 0.5, 0.5])))
    assert not outside


def test_load_model_errors(heisenberg, e2_algebra, affine_line, leibniz_dim2):
    with pytest.raises(ConfigError):
        load_model("so3", heisenberg)
    with pytest.raises(ConfigError):
        load_model("matrix-local", affine_line, {})
    with pytest.raises(ConfigError):
        NilpotentBCHModel(e2_algebra)
    with pytest.raises(ConfigError):
        E2CoverModel(heisenberg)
    with pytest.raises(ConfigError):
        NilpotentBCHModel(leibniz_dim2)


def test_matrix_local_basis_checks(affine_line):
    with pytest.raises(ConfigError):
        MatrixLocalModel(affine_line, [[[1, 0], [0, 0]], [[2, 0], [0, 0]]])
    with pytest.raises(ConfigError):
        MatrixLocalModel(affine_line, [[[1, 0], [0, 0]], [[0, 0], [0, 1]]])
    with pytest.raises(InputError):
        MatrixLocalModel(affine_line, [[[1, 0], [0, 0]]])


@pytest.mark.parametrize(
    "basis",
    [5, [[1, 0], [0, 0]], [[[1, 0]], [[0, 1]]], [[[1, 0], [0, "x"]], [[0, 1], [0, 0]]], []],
)
def test_matrix_local_parameters_are_validated(affine_line, basis):
    with pytest.raises(InputError):
        load_model("matrix-local", affine_line, {"basis_matrices": basis})
    if not isinstance(basis, list):
        with pytest.raises(InputError):
            MatrixLocalModel(affine_line, basis)


# section

@pytest.mark.parametrize("name", ["heisenberg", "e2_type", "affine_line"])
def test_section_at_identity(name, cfg):
    model = fixture_model(name)
    assert np.all(to_float(section_s(model, model.identity, cfg)) == 0.0)
    report = section_identity_check(model, cfg)
    assert report.passed, report.first_failure()
    assert report.check("section_tangent_identity").max_defect < 1e-6


@pytest.mark.parametrize("name", ["heisenberg", "e2_type"])
def test_section_equivariance(name, cfg):
    report = section_equivariance_check(fixture_model(name), cfg, n_samples=256, seed=0)
    assert report.passed, report.first_failure()
    assert report.max_defect < 1e-9


def test_section_values_on_e2(cfg):
    model = fixture_model("e2_type")
    xi = np.array([0.9 * math.pi, 0.0, 0.0])
    value = section_s(model, model.exp(xi), cfg)
    gamma = plateau(0.9 * math.pi, cfg.tau_prime, cfg.tau)
    assert np.allclose(value, gamma * xi, atol=1e-9)
    small = np.array([0.4, 0.2, -0.1])
    assert np.allclose(section_s(model, model.exp(small), cfg), small, atol=1e-12)
    assert np.all(section_s(model, model.exp(np.array([3.5, 1.0, 1.0])), cfg) == 0.0)


# dirty rack

@pytest.mark.parametrize("name", HEMISEMIDIRECT)
def test_integration_report(name, cfg):
    rack = pullback(name, cfg)
    assert rack.fiber_dim == fixture_expected(name)["fiber_dim"]
    report = integration_report(rack)
    assert report.passed, report.first_failure()
    names = [c.name for c in report.checks]
    for expected in ("self_distributivity", "membership_preserved", "fiber_dimension", "tangent_bracket"):
        assert expected in names
    assert report.check("self_distributivity").max_defect < 1e-9


@pytest.mark.parametrize("name", ["hemisemidirect_heisenberg", "hemisemidirect_e2"])
def test_tangent_recovers_derived_bracket(name, cfg):
    rack = pullback(name, cfg)
    record = tangent_check(rack).check("tangent_bracket")
    assert record.passed
    assert record.max_defect < 1e-4
    expected = to_float(load_algebra(name).structure)
    assert np.allclose(np.array(record.details["table"], dtype=float), expected, atol=1e-4)


def test_hemisemidirect_dim2_single_entry(cfg):
    record = tangent_check(pullback("hemisemidirect_dim2", cfg)).check("tangent_bracket")
    table = np.array(record.details["table"], dtype=float)
    assert table[0, 1, 1] == pytest.approx(1.0, abs=1e-4)
    table[0, 1, 1] = 0.0
    assert np.max(np.abs(table)) < 1e-4


def test_canonical_augmentation_integrates(leibniz_dim2, cfg):
    aug = canonical_augmentation(leibniz_dim2)
    rack = build_pullback_rack(aug, load_model("nilpotent-bch", aug.g), cfg)
    assert rack.fiber_dim == 1
    record = tangent_check(rack).check("tangent_bracket")
    assert record.passed
    assert np.array(record.details["table"], dtype=float)[0, 0, 1] == pytest.approx(1.0, abs=1e-4)


def test_fibers_and_membership(cfg):
    rack = pullback("hemisemidirect_heisenberg", cfg)
    assert rack.fiber_dim == 1
    assert rack.contains(rack.unit)
    fibers = fiber_dimension_check(rack, n_base=32, seed=0)
    assert fibers.passed
    assert fibers.check("fiber_dimension").details["expected"] == 1
    assert membership_preservation_check(rack, n_samples=256, seed=0).passed


def test_rack_product_keeps_points_on_the_carrier(cfg):
    rack = pullback("hemisemidirect_e2", cfg)
    rng = np.random.default_rng(7)
    for _ in range(64):
        m, mp = rack.sample(rng), rack.sample(rng)
        out = rack_product_M(rack, m, mp)
        assert rack.contains(out)
        assert rack.distance(rack_product_M(rack, rack.unit, m), m) < 1e-12


def test_exact_dirty_rack_over_heisenberg(cfg):
    rack = pullback("hemisemidirect_heisenberg", cfg)
    rng = np.random.default_rng(8)
    m = rack.sample(rng)
    assert m.x.dtype == object
    lifted = rack.lift(as_array([1, "1/2", -3], ScalarMode.RATIONAL))
    assert list(rack.aug.project(lifted)) == [1, Fraction(1, 2), -3]


def test_rack_product_rejects_points_off_the_carrier(cfg):
    rack = pullback("hemisemidirect_heisenberg", cfg)
    bad = RackPoint(np.ones(4), rack.model.identity)
    with pytest.raises(CarrierError):
        rack_product_M(rack, bad, rack.unit)
    with pytest.raises(CarrierError):
        rack_product_M(rack, rack.unit, bad)


def test_pullback_preconditions(cfg, heisenberg):
    aug = load_augmentation("hemisemidirect_dim2")
    with pytest.raises(InputError):
        build_pullback_rack(aug, load_model("nilpotent-bch", heisenberg), cfg)

    zero_map = AugmentedLeibnizAlgebra.from_tables([[[0]]], [[0]], [[[0]]], ScalarMode.RATIONAL, g_dim=1, h_dim=1)
    with pytest.raises(ConfigError):
        build_pullback_rack(zero_map, load_model("nilpotent-bch", zero_map.g), cfg)

    broken = AugmentedLeibnizAlgebra.from_tables(
        [[[0]]], [[0, 1]], [[[0, 0], [0, 1]]], ScalarMode.RATIONAL, g_dim=1, h_dim=2,
    )
    with pytest.raises(PreconditionError):
        build_pullback_rack(broken, load_model("nilpotent-bch", broken.g), cfg)


def test_tangent_step_must_stay_on_the_plateau():
    cfg = IntegrationConfig(fd_step=2.0)
    rack = pullback("hemisemidirect_e2", cfg)
    with pytest.raises(ConfigError):
        tangent_check(rack)


# Lie case and nilradical

@pytest.mark.parametrize("name", ["heisenberg", "affine_line"])
def test_lie_case_reduces_to_conjugation(name, cfg):
    report = lie_case_reduction(load_algebra(name), fixture_model(name), cfg, n_samples=256, seed=0)
    assert report.passed, report.first_failure()
    assert report.check("conjugation_transport").max_defect < 1e-9


def test_lie_case_needs_a_lie_algebra(leibniz_dim2, cfg):
    with pytest.raises(PreconditionError):
        lie_case_reduction(leibniz_dim2, fixture_model("heisenberg"), cfg)


@pytest.mark.parametrize("name", ["affine_line", "e2_type"])
def test_nilradical_translation(name, cfg):
    spec, alg = load_fixture(name)
    report = verify_nilradical_translation(alg, spec.nilradical, cfg, n_samples=100, seed=0)
    assert report.passed, report.first_failure()
    assert report.check("char_poly_translation").max_defect == 0.0


def test_nilradical_must_be_an_ideal(e2_algebra, cfg):
    with pytest.raises(PreconditionError):
        verify_nilradical_translation(e2_algebra, [[1, 0, 0]], cfg)


# configuration

def test_integration_config_validation():
    with pytest.raises(ConfigError):
        IntegrationConfig.from_settings(None, tau=4.0)
    with pytest.raises(ConfigError):
        IntegrationConfig.from_settings(None, tau=1.5, tau_prime=2.0)
    cfg = IntegrationConfig.from_settings(None, samples=None, seed=9)
    assert cfg.samples == 256 and cfg.seed == 9
