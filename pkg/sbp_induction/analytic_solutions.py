"""
Closed-form solutions and data providers of the experiments.

Every evaluator takes ``(t, x, y, z)`` with coordinates as scalars or arrays of
a common shape and returns an array of shape ``(3,) + shape``.
"""
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from typing import Callable
from typing import Optional
from typing import Tuple

import numpy as np
import numpy.typing as npt

from sbp_induction.exceptions import ConfigurationError
from sbp_induction.fields import GridSpec
from sbp_induction.induction_rhs import BoundaryCondition
from sbp_induction.induction_rhs import BoundaryKind
from sbp_induction.induction_rhs import FormSelection
from sbp_induction.typing import Coordinate
from sbp_induction.typing import FieldEvaluator
from sbp_induction.typing import VectorGridFn

SQRT3 = np.sqrt(3.0)


class CaseKind(str, Enum):
    ROTATION_3D = "rotation3d"
    CONFINED = "confined"
    HALL_PERIODIC = "hall-periodic"
    HALL_OUTFLOW = "hall-outflow"
    DIVERGENCE_BOUND = "divbound"


def _coords(x: Coordinate, y: Coordinate, z: Coordinate) -> Tuple[np.ndarray, ...]:
    return tuple(np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z))))


def rotation_matrix(t: float) -> npt.NDArray[np.float64]:
    """Rotation by the angle ``t`` about the axis ``(1, 1, 1)/√3``."""
    c, s = np.cos(t), np.sin(t)
    return np.array(
        [
            [1 + 2 * c, 1 - c - SQRT3 * s, 1 - c + SQRT3 * s],
            [1 - c + SQRT3 * s, 1 + 2 * c, 1 - c - SQRT3 * s],
            [1 - c - SQRT3 * s, 1 - c + SQRT3 * s, 1 + 2 * c],
        ]
    ) / 3.0


def _rotation_initial(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> VectorGridFn:
    alpha = np.exp(
        -5.0
        / 3.0
        * (
            3.0
            - 2.0 * (3.0 + SQRT3) * x
            + 12.0 * x**2
            - 2.0 * (-3.0 + SQRT3) * y
            + 12.0 * y**2
            + 4.0 * SQRT3 * z
            + 12.0 * z**2
        )
    )
    return alpha * np.stack(
        [
            (3.0 - SQRT3 - 4.0 * SQRT3 * y + 4.0 * SQRT3 * z) / 48.0,
            (-3.0 - SQRT3 + 4.0 * SQRT3 * x - 4.0 * SQRT3 * z) / 48.0,
            (1.0 - 2.0 * x + 2.0 * y) / (8.0 * SQRT3),
        ]
    )


def rotation_velocity(
    t: float, x: Coordinate, y: Coordinate, z: Coordinate
) -> VectorGridFn:
    x, y, z = _coords(x, y, z)
    return np.stack([z - y, x - z, y - x]) / SQRT3


def eval_rotation3d(
    t: float, x: Coordinate, y: Coordinate, z: Coordinate
) -> Tuple[VectorGridFn, VectorGridFn]:
    """
    Gaussian field carried by the rigid rotation about ``(1, 1, 1)/√3``:
    ``B(t, x) = R(t) B⁰(R(-t) x)``. Returns ``(B, u)``.
    """
    x, y, z = _coords(x, y, z)
    back = np.einsum("ij,j...->i...", rotation_matrix(-t), np.stack([x, y, z]))
    B = np.einsum("ij,j...->i...", rotation_matrix(t), _rotation_initial(*back))
    return B, rotation_velocity(t, x, y, z)


def confined_velocity(
    t: float, x: Coordinate, y: Coordinate, z: Coordinate
) -> VectorGridFn:
    x, y, z = _coords(x, y, z)
    sx, sy, sz = np.sin(np.pi * x), np.sin(np.pi * y), np.sin(np.pi * z)
    cx, cy, cz = np.cos(np.pi * x), np.cos(np.pi * y), np.cos(np.pi * z)
    return np.stack([sx * cy * cz, cx * sy * cz, -2.0 * cx * cy * sz])


def eval_confined(
    x: Coordinate, y: Coordinate, z: Coordinate
) -> Tuple[VectorGridFn, VectorGridFn]:
    """Stationary solution ``B = u`` on ``[0, 1]³``, with u vanishing on the faces."""
    u = confined_velocity(0.0, x, y, z)
    return u.copy(), u


@dataclass(frozen=True)
class HallWaveParams:
    """
    Parameters of the exact Hall-MHD wave ``B = αu + n`` where u is an ABC flow
    travelling along ``n``. The wave number follows as ``k = (1 - α²)/α``.
    """

    alpha: float = 0.5
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0
    n: Tuple[float, float, float] = (1 / SQRT3, 1 / SQRT3, 1 / SQRT3)

    def __post_init__(self) -> None:
        if not 0 < abs(self.alpha) < 1:
            raise ConfigurationError(
                f"alpha must satisfy 0 < |alpha| < 1, got {self.alpha}"
            )

    @property
    def k(self) -> float:
        return (1.0 - self.alpha**2) / self.alpha

    @property
    def period(self) -> float:
        return 2.0 * np.pi / abs(self.k)

    def velocity(
        self, t: float, x: Coordinate, y: Coordinate, z: Coordinate
    ) -> VectorGridFn:
        x, y, z = _coords(x, y, z)
        k, shift = self.k, self.alpha * self.k * t
        px = k * x + shift * self.n[0]
        py = k * y + shift * self.n[1]
        pz = k * z + shift * self.n[2]
        return np.stack(
            [
                self.a * np.cos(py) + self.b * np.sin(pz),
                self.b * np.cos(pz) + self.c * np.sin(px),
                self.c * np.cos(px) + self.a * np.sin(py),
            ]
        )

    def magnetic_field(
        self, t: float, x: Coordinate, y: Coordinate, z: Coordinate
    ) -> VectorGridFn:
        u = self.velocity(t, x, y, z)
        return self.alpha * u + np.reshape(self.n, (3,) + (1,) * (u.ndim - 1))


def eval_hall_periodic(
    t: float,
    x: Coordinate,
    y: Coordinate,
    z: Coordinate,
    params: Optional[HallWaveParams] = None,
) -> Tuple[VectorGridFn, VectorGridFn, float]:
    """Returns ``(B, u, ρ)`` of the Hall wave; the density is ``ρ ≡ 1``."""
    params = params or HallWaveParams()
    return params.magnetic_field(t, x, y, z), params.velocity(t, x, y, z), 1.0


def eval_divbound_boundary(t: float, n_mode: int) -> npt.NDArray[np.float64]:
    """Boundary value ``B^b = (sin(n t), 0, 0)``."""
    return np.array([np.sin(n_mode * t), 0.0, 0.0])


def divbound_solution(n_mode: int) -> FieldEvaluator:
    """
    Exact solution of the transport of the boundary signal with ``u = (1, 0, 0)``
    starting from ``B = 0``: ``B₁ = sin(n(t - x))`` for ``x < t`` and zero
    elsewhere. Its restriction to ``x = 0`` is the boundary data.
    """

    def evaluate(t: float, x: Coordinate, y: Coordinate, z: Coordinate) -> VectorGridFn:
        x, y, z = _coords(x, y, z)
        b1 = np.where(x < t, np.sin(n_mode * (t - x)), 0.0)
        zeros = np.zeros_like(b1)
        return np.stack([b1, zeros, zeros.copy()])

    return evaluate


def divbound_velocity(
    t: float, x: Coordinate, y: Coordinate, z: Coordinate
) -> VectorGridFn:
    x, y, z = _coords(x, y, z)
    ones = np.ones_like(x)
    return np.stack([ones, 0.0 * ones, 0.0 * ones])


def divbound_reference_norms(n_mode: int) -> Tuple[float, float]:
    """Continuous ``(‖B‖², ‖div B‖²)`` for ``t ≥ π``."""
    return np.pi / 2.0, n_mode**2 * np.pi / 2.0


@dataclass(frozen=True, eq=False)
class ExperimentCase:
    """
    Geometry, data and defaults of one experiment. ``exact`` is ``None`` when
    no analytical solution is known.
    """

    kind: CaseKind
    lo: float
    hi: Tuple[float, float, float]
    periodic: bool
    final_time: float
    boundary: BoundaryKind
    hall: bool
    velocity: FieldEvaluator
    stationary_velocity: bool
    initial: FieldEvaluator
    exact: Optional[FieldEvaluator]
    default_forms: FormSelection = field(default_factory=FormSelection)
    rho: float = 1.0

    def build_grid(self, order: int, n: int) -> GridSpec:
        return GridSpec.build(order, n, lo=self.lo, hi=self.hi, periodic=self.periodic)

    def boundary_condition(self, outflow_u_full: bool = False) -> BoundaryCondition:
        data = self.exact if self.boundary is BoundaryKind.LINEAR_INFLOW else None
        return BoundaryCondition(self.boundary, data, outflow_u_full)


def _from_pair(evaluate: Callable[..., tuple], index: int = 0) -> FieldEvaluator:
    def field_of(
        t: float, x: Coordinate, y: Coordinate, z: Coordinate
    ) -> VectorGridFn:
        return evaluate(t, x, y, z)[index]

    return field_of


def _confined_field(
    t: float, x: Coordinate, y: Coordinate, z: Coordinate
) -> VectorGridFn:
    return eval_confined(x, y, z)[0]


def make_case(
    kind: str,
    hall_params: Optional[HallWaveParams] = None,
    divbound_mode: int = 1,
) -> ExperimentCase:
    """Build the experiment registered under ``kind``."""
    try:
        kind = CaseKind(kind)
    except ValueError:
        choices = ", ".join(member.value for member in CaseKind)
        raise ConfigurationError(
            f"Unknown test case {kind!r}, expected one of {choices}"
        ) from None

    if kind is CaseKind.ROTATION_3D:
        rotation_field = _from_pair(eval_rotation3d)
        return ExperimentCase(
            kind=kind,
            lo=-1.0,
            hi=(1.0, 1.0, 1.0),
            periodic=False,
            final_time=2.0 * np.pi,
            boundary=BoundaryKind.LINEAR_INFLOW,
            hall=False,
            velocity=rotation_velocity,
            stationary_velocity=True,
            initial=rotation_field,
            exact=rotation_field,
        )

    if kind is CaseKind.CONFINED:
        return ExperimentCase(
            kind=kind,
            lo=0.0,
            hi=(1.0, 1.0, 1.0),
            periodic=False,
            final_time=2.0,
            boundary=BoundaryKind.LINEAR_INFLOW,
            hall=False,
            velocity=confined_velocity,
            stationary_velocity=True,
            initial=_confined_field,
            exact=_confined_field,
        )

    if kind in (CaseKind.HALL_PERIODIC, CaseKind.HALL_OUTFLOW):
        params = hall_params or HallWaveParams()
        periodic = kind is CaseKind.HALL_PERIODIC
        return ExperimentCase(
            kind=kind,
            lo=0.0,
            hi=(params.period,) * 3,  # type: ignore[arg-type]
            periodic=periodic,
            final_time=1.0,
            boundary=(
                BoundaryKind.PERIODIC_NONE if periodic else BoundaryKind.HALL_OUTFLOW
            ),
            hall=True,
            velocity=params.velocity,
            stationary_velocity=False,
            initial=params.magnetic_field,
            exact=params.magnetic_field if periodic else None,
            # The zero source form blows up at the outflow boundary.
            default_forms=FormSelection(
                "central", "zero" if periodic else "central", "central"
            ),
        )

    if divbound_mode < 1:
        raise ConfigurationError(f"DIVBOUND_MODE must be positive, got {divbound_mode}")
    solution = divbound_solution(divbound_mode)
    return ExperimentCase(
        kind=kind,
        lo=0.0,
        hi=(np.pi, 1.0, 1.0),
        periodic=False,
        final_time=2.0 * np.pi,
        boundary=BoundaryKind.LINEAR_INFLOW,
        hall=False,
        velocity=divbound_velocity,
        stationary_velocity=True,
        initial=solution,
        exact=solution,
        # With u parallel to B the transport term vanishes, only the source
        # term carries the boundary signal into the domain.
        default_forms=FormSelection("central", "central", "central"),
    )
