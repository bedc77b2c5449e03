import numpy as np
import pytest

from sbp_induction.analytic_solutions import CaseKind
from sbp_induction.analytic_solutions import divbound_reference_norms
from sbp_induction.analytic_solutions import divbound_solution
from sbp_induction.analytic_solutions import eval_confined
from sbp_induction.analytic_solutions import eval_divbound_boundary
from sbp_induction.analytic_solutions import eval_hall_periodic
from sbp_induction.analytic_solutions import eval_rotation3d
from sbp_induction.analytic_solutions import HallWaveParams
from sbp_induction.analytic_solutions import make_case
from sbp_induction.analytic_solutions import rotation_matrix
from sbp_induction.analytic_solutions import rotation_velocity
from sbp_induction.exceptions import ConfigurationError
from sbp_induction.fields import divergence
from sbp_induction.fields import GridSpec
from sbp_induction.fields import norm_m
from sbp_induction.induction_rhs import BoundaryCondition
from sbp_induction.induction_rhs import BoundaryKind
from sbp_induction.induction_rhs import FormSelection
from sbp_induction.induction_rhs import HallParams
from sbp_induction.induction_rhs import rhs


@pytest.mark.parametrize("t", [0.0, 0.3, 2.0, np.pi])
def test_rotation_matrix(t):
    R = rotation_matrix(t)
    assert np.allclose(R @ R.T, np.eye(3))
    assert np.linalg.det(R) == pytest.approx(1.0)
    assert np.allclose(R @ np.ones(3), np.ones(3))
    assert np.allclose(rotation_matrix(-t), R.T)


def test_rotation_is_periodic():
    assert np.allclose(rotation_matrix(0.0), np.eye(3))
    assert np.allclose(rotation_matrix(2.0 * np.pi), np.eye(3))


def test_rotation_velocity_is_a_rigid_rotation():
    x, y, z = np.random.default_rng(0).uniform(-1, 1, (3, 20))
    u = rotation_velocity(0.0, x, y, z)
    assert np.allclose(np.einsum("i...,i...->...", u, np.stack([x, y, z])), 0.0)
    assert np.allclose(np.sum(u, axis=0), 0.0)


def test_rotation_solution_returns_after_one_period():
    grid = GridSpec.build(2, 7, lo=-1.0, hi=1.0)
    B0, u = eval_rotation3d(0.0, *grid.coordinates)
    B1, _ = eval_rotation3d(2.0 * np.pi, *grid.coordinates)
    assert B0.shape == (3,) + grid.shape
    assert u.shape == (3,) + grid.shape
    assert np.allclose(B0, B1)


def test_rotation_solution_is_transported():
    point = np.array([0.2, -0.1, 0.3])
    t = 0.7
    B_t, _ = eval_rotation3d(t, *(rotation_matrix(t) @ point))
    B_0, _ = eval_rotation3d(0.0, *point)
    assert np.allclose(B_t, rotation_matrix(t) @ B_0)


def test_rotation_solution_is_divergence_free():
    grid = GridSpec.build(6, 31, lo=-1.0, hi=1.0)
    B, _ = eval_rotation3d(1.0, *grid.coordinates)
    assert norm_m(grid, divergence(grid, B)) <= 1e-3


def test_confined_solution():
    grid = GridSpec.build(4, 41)
    B, u = eval_confined(*grid.coordinates)
    assert np.array_equal(B, u)
    assert B is not u
    for axis in range(3):
        for node in (0, -1):
            face = grid.face_index(axis, node)
            assert np.allclose(u[axis][face], 0.0, atol=1e-15)
    assert norm_m(grid, divergence(grid, B)) <= 1e-2


def test_hall_wave_parameters():
    params = HallWaveParams()
    assert params.k == pytest.approx(1.5)
    assert params.period == pytest.approx(4.0 * np.pi / 3.0)
    with pytest.raises(ConfigurationError):
        HallWaveParams(alpha=1.0)
    with pytest.raises(ConfigurationError):
        HallWaveParams(alpha=0.0)


def test_hall_wave_structure():
    params = HallWaveParams()
    x, y, z = np.random.default_rng(1).uniform(0, 3, (3, 10))
    B, u, rho = eval_hall_periodic(0.4, x, y, z)
    assert rho == 1.0
    assert np.allclose(B - 0.5 * u, np.reshape(params.n, (3, 1)))
    shifted, _, _ = eval_hall_periodic(0.4, x + params.period, y, z + params.period)
    assert np.allclose(shifted, B)


def _hall_residual(n):
    params = HallWaveParams()
    grid = GridSpec.build(4, n, lo=0.0, hi=params.period, periodic=True)
    t, h = 0.3, 1e-5
    B = grid.sample(params.magnetic_field, t)
    later = grid.sample(params.magnetic_field, t + h)
    earlier = grid.sample(params.magnetic_field, t - h)
    dBdt = (later - earlier) / (2.0 * h)
    out = rhs(
        grid,
        FormSelection("central", "central", "central"),
        BoundaryCondition(),
        HallParams(1.0),
        lambda s: grid.sample(params.velocity, s),
        t,
        B,
    )
    return norm_m(grid, out - dBdt) / norm_m(grid, dBdt)


def test_hall_wave_solves_the_discrete_equation():
    coarse = _hall_residual(12)
    fine = _hall_residual(24)
    assert fine <= 2e-2
    assert coarse / fine >= 8.0


def test_divbound_data():
    assert np.allclose(eval_divbound_boundary(0.0, 3), 0.0)
    assert np.allclose(eval_divbound_boundary(np.pi / 4.0, 2), [1.0, 0.0, 0.0])
    solution = divbound_solution(2)
    x = np.array([0.0, 0.5, 1.0, 2.0])
    B = solution(1.0, x, 0.0 * x, 0.0 * x)
    assert np.allclose(B[0], [np.sin(2.0), np.sin(1.0), 0.0, 0.0])
    assert np.allclose(B[1:], 0.0)
    assert np.allclose(solution(0.0, x, x, x), 0.0)
    at_inflow = solution(2.5, np.zeros(3), np.ones(3), np.zeros(3))
    assert np.allclose(at_inflow[0], eval_divbound_boundary(2.5, 2)[0])
    assert divbound_reference_norms(4) == pytest.approx((np.pi / 2.0, 8.0 * np.pi))


def test_case_registry():
    rotation = make_case("rotation3d")
    assert rotation.kind is CaseKind.ROTATION_3D
    assert rotation.lo == -1.0
    assert rotation.final_time == pytest.approx(2.0 * np.pi)
    assert rotation.boundary is BoundaryKind.LINEAR_INFLOW
    assert rotation.default_forms == FormSelection()
    assert not rotation.hall

    confined = make_case("confined")
    assert confined.final_time == 2.0
    assert confined.stationary_velocity

    hall = make_case("hall-periodic")
    assert hall.periodic and hall.hall
    assert hall.boundary is BoundaryKind.PERIODIC_NONE
    assert hall.hi == pytest.approx((4.0 * np.pi / 3.0,) * 3)
    grid = hall.build_grid(2, 8)
    assert grid.fully_periodic

    outflow = make_case("hall-outflow")
    assert outflow.exact is None
    assert outflow.boundary is BoundaryKind.HALL_OUTFLOW
    assert not outflow.periodic
    assert outflow.final_time == 1.0
    assert outflow.default_forms == FormSelection("central", "central", "central")
    assert hall.default_forms == FormSelection("central", "zero", "central")

    divbound = make_case("divbound", divbound_mode=3)
    assert divbound.hi == pytest.approx((np.pi, 1.0, 1.0))
    assert divbound.default_forms == FormSelection("central", "central", "central")
    bc = divbound.boundary_condition()
    assert isinstance(bc, BoundaryCondition)
    assert bc.boundary_data is divbound.exact


def test_unknown_cases():
    with pytest.raises(ConfigurationError):
        make_case("orszag-tang")
    with pytest.raises(ConfigurationError):
        make_case("divbound", divbound_mode=0)
