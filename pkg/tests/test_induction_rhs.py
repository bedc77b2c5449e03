import itertools

import numpy as np
import pytest

from sbp_induction.analytic_solutions import eval_confined
from sbp_induction.analytic_solutions import make_case
from sbp_induction.exceptions import BoundaryDataError
from sbp_induction.exceptions import InvalidFormError
from sbp_induction.exceptions import NonPositiveDensityError
from sbp_induction.fields import apply_axis_d
from sbp_induction.fields import divergence
from sbp_induction.fields import face_integral
from sbp_induction.fields import FACES
from sbp_induction.fields import GridSpec
from sbp_induction.fields import inner_m
from sbp_induction.induction_rhs import BoundaryCondition
from sbp_induction.induction_rhs import BoundaryKind
from sbp_induction.induction_rhs import current_density
from sbp_induction.induction_rhs import energy_rate
from sbp_induction.induction_rhs import FORM_PRESETS
from sbp_induction.induction_rhs import FormSelection
from sbp_induction.induction_rhs import HallParams
from sbp_induction.induction_rhs import make_rhs
from sbp_induction.induction_rhs import max_velocity_gradient
from sbp_induction.induction_rhs import rhs
from sbp_induction.induction_rhs import sat_hall_outflow
from sbp_induction.induction_rhs import sat_linear_inflow
from sbp_induction.induction_rhs import SourceForm
from sbp_induction.induction_rhs import UiBjForm
from sbp_induction.induction_rhs import UjBiForm
from sbp_induction.induction_rhs import VelocitySampler
from sbp_induction.induction_rhs import volume_hall
from sbp_induction.induction_rhs import volume_linear
from tests.utils import flux_volume
from tests.utils import hall_volume
from tests.utils import random_vector

ALL_FORMS = [
    FormSelection(a, b, c)
    for a, b, c in itertools.product(
        [f.value for f in UiBjForm],
        [f.value for f in SourceForm],
        [f.value for f in UjBiForm],
    )
]


def _zero_data(t, x, y, z):
    return np.zeros((3,) + np.shape(x))


def _constant(values):
    def evaluate(t, x, y, z):
        return np.stack([np.full(np.shape(x), v) for v in values])

    return evaluate


@pytest.fixture(scope="function")
def grid():
    return GridSpec.build(2, (6, 6, 6))


@pytest.fixture(scope="function")
def periodic_grid():
    return GridSpec.build(4, 8, lo=0.0, hi=2.0 * np.pi, periodic=True)


def test_form_selection_parsing():
    forms = FormSelection.parse("split,central,split")
    assert forms == FormSelection(UiBjForm.SPLIT, SourceForm.CENTRAL, UjBiForm.SPLIT)
    assert FormSelection.parse("Product-Zero-Central").label == "product-zero-central"
    assert FormSelection.parse(["central", "zero", "split"]).ujBi is UjBiForm.SPLIT
    assert FormSelection() == FORM_PRESETS[1]
    assert FormSelection.preset(4) == FormSelection("product", "central", "product")


@pytest.mark.parametrize("text", ["split,central", "split,central,split,zero", ""])
def test_form_selection_needs_three_names(text):
    with pytest.raises(InvalidFormError):
        FormSelection.parse(text)


def test_unknown_forms():
    with pytest.raises(InvalidFormError):
        FormSelection("upwind", "zero", "central")
    with pytest.raises(InvalidFormError):
        FormSelection("central", "product", "central")
    with pytest.raises(InvalidFormError):
        FormSelection.preset(7)


def test_boundary_condition_validation():
    with pytest.raises(BoundaryDataError):
        BoundaryCondition(BoundaryKind.LINEAR_INFLOW)
    bc = BoundaryCondition("hall-outflow")
    assert bc.kind is BoundaryKind.HALL_OUTFLOW


@pytest.mark.parametrize("rho", [0.0, -1.0, np.nan])
def test_density_must_be_positive(rho):
    with pytest.raises(NonPositiveDensityError):
        HallParams(rho)


@pytest.mark.parametrize("forms", ALL_FORMS, ids=lambda f: f.label)
def test_volume_terms_match_flux_form(forms):
    grid = GridSpec.build(2, (5, 4, 3))
    u = random_vector(grid, seed=1)
    B = random_vector(grid, seed=2)
    expected = flux_volume(grid, forms, u, B)
    assert np.allclose(volume_linear(grid, forms, u, B), expected, atol=1e-10)


@pytest.mark.parametrize("forms", [FORM_PRESETS[p] for p in (1, 3, 5)], ids=str)
def test_periodic_volume_terms_match_flux_form(forms):
    grid = GridSpec.build(4, (6, 5, 5), lo=0.0, hi=1.0, periodic=True)
    u = random_vector(grid, seed=3)
    B = random_vector(grid, seed=4)
    expected = flux_volume(grid, forms, u, B)
    assert np.allclose(volume_linear(grid, forms, u, B), expected, atol=1e-9)


@pytest.mark.parametrize("ujbi", [f.value for f in UjBiForm])
def test_product_form_equals_split_form_with_split_source(grid, ujbi):
    u = random_vector(grid, seed=5)
    B = random_vector(grid, seed=6)
    product = volume_linear(grid, FormSelection("product", "central", ujbi), u, B)
    split = volume_linear(grid, FormSelection("split", "split", ujbi), u, B)
    assert np.allclose(product, split, atol=1e-10)


def test_transport_vanishes_for_parallel_fields(grid):
    u = random_vector(grid, seed=7)
    out = volume_linear(grid, FormSelection("central", "zero", "central"), u, u.copy())
    assert np.max(np.abs(out)) == 0.0


def test_central_forms_keep_the_divergence_periodic(periodic_grid):
    u = random_vector(periodic_grid, seed=8)
    B = random_vector(periodic_grid, seed=9)
    forms = FormSelection("central", "zero", "central")
    out = volume_linear(periodic_grid, forms, u, B)
    assert np.max(np.abs(divergence(periodic_grid, out))) <= 1e-10


def test_hall_term_matches_index_form(grid):
    B = random_vector(grid, seed=10)
    hall = HallParams(2.0)
    expected = hall_volume(grid, B, rho=2.0)
    assert np.allclose(volume_hall(grid, hall, B), expected, atol=1e-9)


def test_hall_term_vanishes_for_constant_fields(grid):
    B = np.ones((3,) + grid.shape) * np.array([1.0, -2.0, 0.5])[:, None, None, None]
    assert np.allclose(volume_hall(grid, HallParams(), B), 0.0)


def test_hall_term_conserves_energy_on_periodic_grids(periodic_grid):
    B = random_vector(periodic_grid, seed=11)
    hall = HallParams(np.full(periodic_grid.shape, 0.7))
    out = volume_hall(periodic_grid, hall, B)
    scale = np.sqrt(inner_m(periodic_grid, out, out) * inner_m(periodic_grid, B, B))
    assert abs(energy_rate(periodic_grid, B, out)) <= 1e-12 * scale


def test_linear_inflow_sat_order2_value():
    grid = GridSpec.build(2, (5, 3, 3))
    dx = grid.dx[0]
    u = np.zeros((3,) + grid.shape)
    u[0] = 1.0
    B = np.zeros((3,) + grid.shape)
    B[0] = 1.0
    bc = BoundaryCondition(BoundaryKind.LINEAR_INFLOW, _zero_data)
    sat = sat_linear_inflow(grid, u, B, bc)
    # Inflow only through the low x face, where ν u₁ = -1.
    assert np.allclose(sat[0, 0], -2.0 / dx)
    assert np.allclose(sat[0, 1:], 0.0)
    assert np.allclose(sat[1:], 0.0)


def test_linear_inflow_sat_is_inactive_on_outflow_and_matching_data(grid):
    x = grid.coordinates[0]
    u = np.stack([x - 0.5, np.zeros(grid.shape), np.zeros(grid.shape)])
    B = random_vector(grid, seed=12)
    bc = BoundaryCondition(BoundaryKind.LINEAR_INFLOW, _zero_data)
    # u points out of the domain on both x faces and is tangential elsewhere
    assert np.allclose(sat_linear_inflow(grid, u, B, bc), 0.0)

    values = (0.3, -0.2, 0.9)
    data_bc = BoundaryCondition(BoundaryKind.LINEAR_INFLOW, _constant(values))
    inflow = random_vector(grid, seed=13)
    matching = grid.sample(_constant(values), 0.0)
    assert np.allclose(sat_linear_inflow(grid, inflow, matching, data_bc), 0.0)


def test_linear_inflow_sat_adds_up_at_corners(grid):
    u = -np.ones((3,) + grid.shape)
    B = np.ones((3,) + grid.shape)
    bc = BoundaryCondition(BoundaryKind.LINEAR_INFLOW, _zero_data)
    sat = sat_linear_inflow(grid, u, B, bc)
    # u = -1 enters through the three high faces
    corner = -3.0 / grid.ops[0].boundary_weight
    assert sat[0, -1, -1, -1] == pytest.approx(corner)
    assert sat[0, 0, 0, 0] == 0.0


def _linear_rate_identity(grid, u, B):
    """Energy rate of product-central-split with zero inflow data, term by term."""
    volume = 0.0
    for i in range(3):
        for j in range(3):
            dju_i = apply_axis_d(grid, j, u[i])
            volume += 2.0 * inner_m(grid, B[i], B[j] * dju_i)
        volume -= sum(
            inner_m(grid, B[i] ** 2, apply_axis_d(grid, j, u[j])) for j in range(3)
        )
    surface = 0.0
    squared = np.sum(B**2, axis=0)
    for j in range(3):
        weights = grid.face_weights(j)
        for normal, node in FACES:
            face = grid.face_index(j, node)
            un = normal * u[j][face]
            surface -= float(np.sum(weights * np.abs(un) * squared[face]))
    return volume, surface


def test_energy_rate_of_stable_forms(grid):
    u = random_vector(grid, seed=14)
    B = random_vector(grid, seed=15)
    forms = FormSelection("product", "central", "split")
    bc = BoundaryCondition(BoundaryKind.LINEAR_INFLOW, _zero_data)
    dB = volume_linear(grid, forms, u, B) + sat_linear_inflow(grid, u, B, bc)
    rate = energy_rate(grid, B, dB)

    volume, surface = _linear_rate_identity(grid, u, B)
    assert rate == pytest.approx(volume + surface, rel=1e-10)
    assert surface <= 0.0
    bound = 9.0 * max_velocity_gradient(grid, u) * inner_m(grid, B, B)
    assert rate <= bound


def _hall_outflow_surface(grid, u, B, J, u_full=False):
    v = (u if u_full else 0.5 * u) - J
    squared = np.sum(B**2, axis=0)
    total = 0.0
    for j in range(3):
        weights = grid.face_weights(j)
        for normal, node in FACES:
            face = grid.face_index(j, node)
            vn = normal * v[j][face]
            outgoing = np.where(vn < 0, 0.0, vn)
            total -= 2.0 * float(np.sum(weights * outgoing * squared[face]))
    return total


@pytest.mark.parametrize("preset", [2, 3, 4, 5, 6])
def test_energy_rate_with_hall_outflow(preset):
    case = make_case("hall-outflow")
    grid = case.build_grid(2, 8)
    sampler = VelocitySampler(grid, case.velocity)
    bound_rate = 9.0 * max_velocity_gradient(grid, sampler(0.0))
    hall = HallParams(case.rho)
    bc = case.boundary_condition()
    evaluate = make_rhs(grid, FORM_PRESETS[preset], bc, hall, sampler)
    for seed in range(3):
        B = random_vector(grid, seed=20 + seed)
        dB = evaluate(0.0, B)
        assert energy_rate(grid, B, dB) <= bound_rate * inner_m(grid, B, B)


@pytest.mark.parametrize("u_full", [False, True])
def test_hall_outflow_energy_identity(grid, u_full):
    u = random_vector(grid, seed=16)
    B = random_vector(grid, seed=17)
    hall = HallParams()
    J = current_density(grid, hall, B)
    dB = volume_hall(grid, hall, B)
    dB += sat_hall_outflow(grid, u, B, hall, u_full=u_full)
    squared = np.sum(B**2, axis=0)
    transport = sum(face_integral(grid, j, u[j] * squared) for j in range(3))
    if u_full:
        transport *= 2.0
    lhs = energy_rate(grid, B, dB) - transport
    assert lhs == pytest.approx(_hall_outflow_surface(grid, u, B, J, u_full), rel=1e-9)


def test_hall_outflow_dissipates_without_flow(grid):
    u = np.zeros((3,) + grid.shape)
    hall = HallParams()
    for seed in range(5):
        B = random_vector(grid, seed=seed)
        dB = volume_hall(grid, hall, B) + sat_hall_outflow(grid, u, B, hall)
        assert energy_rate(grid, B, dB) <= 1e-10


def test_rhs_is_the_sum_of_its_parts(grid):
    u = random_vector(grid, seed=18)
    B = random_vector(grid, seed=19)
    forms = FORM_PRESETS[5]
    hall = HallParams()

    linear_bc = BoundaryCondition(BoundaryKind.LINEAR_INFLOW, _zero_data)
    expected = volume_linear(grid, forms, u, B)
    expected += sat_linear_inflow(grid, u, B, linear_bc)
    assert np.allclose(rhs(grid, forms, linear_bc, None, lambda t: u, 0.0, B), expected)

    outflow_bc = BoundaryCondition(BoundaryKind.HALL_OUTFLOW)
    expected = (
        volume_linear(grid, forms, u, B)
        + volume_hall(grid, hall, B)
        + sat_hall_outflow(grid, u, B, hall)
    )
    assert np.allclose(rhs(grid, forms, outflow_bc, hall, lambda t: u, 0.0, B), expected)

    none_bc = BoundaryCondition()
    disabled = HallParams(enabled=False)
    expected = volume_linear(grid, forms, u, B)
    assert np.allclose(rhs(grid, forms, none_bc, disabled, lambda t: u, 0.0, B), expected)


def test_hall_outflow_needs_the_hall_term(grid):
    u = random_vector(grid)
    bc = BoundaryCondition("hall-outflow")
    with pytest.raises(BoundaryDataError):
        rhs(grid, FormSelection(), bc, None, lambda t: u, 0.0, u)


def test_confined_steady_state_has_zero_rhs():
    grid = GridSpec.build(4, 12)
    B, u = eval_confined(*grid.coordinates)

    def exact(t, x, y, z):
        return eval_confined(x, y, z)[0]

    bc = BoundaryCondition(BoundaryKind.LINEAR_INFLOW, exact)
    out = rhs(grid, FormSelection(), bc, None, lambda t: u, 0.0, B)
    assert np.max(np.abs(out)) <= 1e-12


def test_make_rhs_and_velocity_sampler(grid):
    calls = []

    def velocity(t, x, y, z):
        calls.append(t)
        zeros = np.zeros(np.shape(x))
        return np.stack([zeros + t, zeros, zeros])

    stationary = VelocitySampler(grid, velocity, stationary=True)
    assert np.allclose(stationary(0.0)[0], 0.0)
    assert np.allclose(stationary(5.0)[0], 0.0)
    assert calls == [0.0]

    moving = VelocitySampler(grid, velocity)
    assert np.allclose(moving(2.0)[0], 2.0)

    bc = BoundaryCondition(BoundaryKind.LINEAR_INFLOW, _zero_data)
    fn = make_rhs(grid, FORM_PRESETS[3], bc, None, moving)
    B = random_vector(grid, seed=20)
    assert np.allclose(fn(1.5, B), rhs(grid, FORM_PRESETS[3], bc, None, moving, 1.5, B))


def test_max_velocity_gradient(grid):
    x, y, z = grid.coordinates
    u = np.stack([3.0 * y, -x, 0.5 * z])
    assert max_velocity_gradient(grid, u) == pytest.approx(3.0)
