"""
Semidiscrete right-hand side of the magnetic induction equation

    ∂ₜB = ∇ × (u × B) - u ∇·B - ∇ × ((∇ × B)/ρ × B)

with selectable discretisations of the transport and source terms, the Hall
term, and weakly imposed boundary conditions (SATs).
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable
from typing import Dict
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np
import numpy.typing as npt

from sbp_induction.exceptions import BoundaryDataError
from sbp_induction.exceptions import InvalidFormError
from sbp_induction.exceptions import NonPositiveDensityError
from sbp_induction.fields import apply_axis_d
from sbp_induction.fields import curl
from sbp_induction.fields import FACES
from sbp_induction.fields import GridSpec
from sbp_induction.fields import inner_m
from sbp_induction.typing import FieldEvaluator
from sbp_induction.typing import ScalarGridFn
from sbp_induction.typing import VectorGridFn

logger = logging.getLogger(__name__)


class UiBjForm(str, Enum):
    """Discretisation of ``∂ⱼ(uᵢBⱼ)``"""

    CENTRAL = "central"
    SPLIT = "split"
    PRODUCT = "product"


class SourceForm(str, Enum):
    """Discretisation of the source term ``-uᵢ∂ⱼBⱼ``"""

    ZERO = "zero"
    CENTRAL = "central"
    SPLIT = "split"


class UjBiForm(str, Enum):
    """Discretisation of ``-∂ⱼ(uⱼBᵢ)``"""

    CENTRAL = "central"
    SPLIT = "split"
    PRODUCT = "product"


def _parse(enum: type, value: Union[str, Enum]) -> Enum:
    if isinstance(value, enum):
        return value
    try:
        return enum(str(value).strip().lower())
    except ValueError:
        choices = ", ".join(member.value for member in enum)  # type: ignore[attr-defined]
        raise InvalidFormError(
            f"Unknown {enum.__name__} {value!r}, expected one of {choices}"
        ) from None


@dataclass(frozen=True)
class FormSelection:
    uiBj: UiBjForm = UiBjForm.CENTRAL
    source: SourceForm = SourceForm.ZERO
    ujBi: UjBiForm = UjBiForm.CENTRAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "uiBj", _parse(UiBjForm, self.uiBj))
        object.__setattr__(self, "source", _parse(SourceForm, self.source))
        object.__setattr__(self, "ujBi", _parse(UjBiForm, self.ujBi))

    @classmethod
    def parse(cls, text: Union[str, Sequence[str]]) -> "FormSelection":
        """
        Build a selection from ``"split,central,split"``, ``"split-central-split"``
        or a sequence of three names.
        """
        parts = text.replace("-", ",").split(",") if isinstance(text, str) else text
        parts = [part for part in parts if str(part).strip()]
        if len(parts) != 3:
            raise InvalidFormError(f"Expected three form names, got {text!r}")
        return cls(*parts)

    @classmethod
    def preset(cls, number: int) -> "FormSelection":
        try:
            return FORM_PRESETS[number]
        except KeyError:
            raise InvalidFormError(
                f"Unknown form preset {number}, expected 1 to {len(FORM_PRESETS)}"
            ) from None

    @property
    def label(self) -> str:
        return f"{self.uiBj.value}-{self.source.value}-{self.ujBi.value}"


FORM_PRESETS: Dict[int, FormSelection] = {
    1: FormSelection("central", "zero", "central"),
    2: FormSelection("central", "central", "central"),
    3: FormSelection("split", "central", "split"),
    4: FormSelection("product", "central", "product"),
    5: FormSelection("product", "central", "split"),
    6: FormSelection("product", "central", "central"),
}


class BoundaryKind(str, Enum):
    LINEAR_INFLOW = "linear-inflow"
    HALL_OUTFLOW = "hall-outflow"
    PERIODIC_NONE = "none"


@dataclass(frozen=True)
class BoundaryCondition:
    """
    Weakly imposed boundary condition. ``boundary_data`` evaluates ``B^b`` at
    ``(t, x, y, z)`` and is required for linear inflow. ``outflow_u_full``
    replaces ``u/2`` by ``u`` in the Hall outflow SAT.
    """

    kind: BoundaryKind = BoundaryKind.PERIODIC_NONE
    boundary_data: Optional[FieldEvaluator] = None
    outflow_u_full: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", BoundaryKind(self.kind))
        if self.kind is BoundaryKind.LINEAR_INFLOW and self.boundary_data is None:
            raise BoundaryDataError("Linear inflow boundaries need boundary data")


@dataclass(frozen=True, eq=False)
class HallParams:
    """Charge density of the Hall term; ``rho`` may be a scalar or grid function."""

    rho: Union[float, ScalarGridFn] = 1.0
    enabled: bool = True

    def __post_init__(self) -> None:
        rho = np.asarray(self.rho, dtype=float)
        if not np.all(np.isfinite(rho)) or not np.min(rho) > 0:
            raise NonPositiveDensityError("The charge density must be positive")
        object.__setattr__(self, "rho", rho)


class _Derivatives(object):
    """Lazily computed derivatives shared by the terms of one volume evaluation."""

    def __init__(self, grid: GridSpec, u: VectorGridFn, B: VectorGridFn) -> None:
        self.grid = grid
        self.u = u
        self.B = B
        self._cache: Dict[tuple, ScalarGridFn] = {}

    def _get(self, key: tuple, compute: Callable[[], ScalarGridFn]) -> ScalarGridFn:
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    def dB(self, j: int, k: int) -> ScalarGridFn:
        return self._get(("B", j, k), lambda: apply_axis_d(self.grid, j, self.B[k]))

    def du(self, j: int, k: int) -> ScalarGridFn:
        return self._get(("u", j, k), lambda: apply_axis_d(self.grid, j, self.u[k]))

    def d_uB(self, j: int, a: int, b: int) -> ScalarGridFn:
        """``Dⱼ(u_a B_b)``"""
        return self._get(
            ("uB", j, a, b),
            lambda: apply_axis_d(self.grid, j, self.u[a] * self.B[b]),
        )


def _uiBj_term(form: UiBjForm, d: _Derivatives, i: int, j: int) -> ScalarGridFn:
    u, B = d.u, d.B
    if form is UiBjForm.CENTRAL:
        return d.d_uB(j, i, j)
    product = u[i] * d.dB(j, j) + B[j] * d.du(j, i)
    if form is UiBjForm.SPLIT:
        return 0.5 * (d.d_uB(j, i, j) + product)
    return product


def _source_term(form: SourceForm, d: _Derivatives, i: int, j: int) -> ScalarGridFn:
    u, B = d.u, d.B
    if form is SourceForm.ZERO:
        return np.zeros(d.grid.shape)
    if form is SourceForm.CENTRAL:
        return -u[i] * d.dB(j, j)
    return -0.5 * (u[i] * d.dB(j, j) + d.d_uB(j, i, j) - B[j] * d.du(j, i))


def _ujBi_term(form: UjBiForm, d: _Derivatives, i: int, j: int) -> ScalarGridFn:
    u, B = d.u, d.B
    if form is UjBiForm.CENTRAL:
        return -d.d_uB(j, j, i)
    product = u[j] * d.dB(j, i) + B[i] * d.du(j, j)
    if form is UjBiForm.SPLIT:
        return -0.5 * (d.d_uB(j, j, i) + product)
    return -product


def volume_linear(
    grid: GridSpec, forms: FormSelection, u: VectorGridFn, B: VectorGridFn
) -> VectorGridFn:
    """
    Volume terms of the linear induction equation, written as compositions of
    derivative operators and pointwise products.
    """
    u = grid.check_vector(u)
    B = grid.check_vector(B)
    d = _Derivatives(grid, u, B)
    out = np.zeros_like(B)
    for i in range(3):
        for j in range(3):
            out[i] += (
                _uiBj_term(forms.uiBj, d, i, j)
                + _source_term(forms.source, d, i, j)
                + _ujBi_term(forms.ujBi, d, i, j)
            )
    return out


def current_density(grid: GridSpec, hall: HallParams, B: VectorGridFn) -> VectorGridFn:
    """``J = (D × B) / ρ``"""
    return curl(grid, B) / hall.rho


def volume_hall(
    grid: GridSpec,
    hall: HallParams,
    B: VectorGridFn,
    current: Optional[VectorGridFn] = None,
) -> VectorGridFn:
    """
    Hall term ``-∇ × (J × B) = Dⱼ(JⱼBᵢ - JᵢBⱼ)`` with ``J = (D × B)/ρ``.
    ``current`` may pass a precomputed J.
    """
    B = grid.check_vector(B)
    J = current_density(grid, hall, B) if current is None else current
    out = np.zeros_like(B)
    for i in range(3):
        for j in range(3):
            if i != j:
                out[i] += apply_axis_d(grid, j, J[j] * B[i] - J[i] * B[j])
    return out


def sat_linear_inflow(
    grid: GridSpec,
    u: VectorGridFn,
    B: VectorGridFn,
    bc: BoundaryCondition,
    t: float = 0.0,
) -> VectorGridFn:
    """
    Upwind SAT ``M⁻¹Eⱼ 1_{u·ν<0} uⱼ (Bᵢ - B^bᵢ)``. On each face of axis j the
    penalty is active at the nodes where ``uⱼνⱼ < 0``; contributions of
    different axes add up at edges and corners.
    """
    if bc.boundary_data is None:
        raise BoundaryDataError("Linear inflow SAT evaluated without boundary data")
    u = grid.check_vector(u)
    B = grid.check_vector(B)
    out = np.zeros_like(B)
    for j in range(3):
        op = grid.ops[j]
        if op.periodic:
            continue
        for normal, node in FACES:
            face = grid.face_index(j, node)
            un = normal * u[j][face]
            inflow = un < 0.0
            if not np.any(inflow):
                continue
            data = np.asarray(
                bc.boundary_data(t, *grid.face_coordinates(j, node)), dtype=float
            )
            coeff = np.where(inflow, un / op.boundary_weight, 0.0)
            for i in range(3):
                out[i][face] += coeff * (B[i][face] - data[i])
    return out


def sat_hall_outflow(
    grid: GridSpec,
    u: VectorGridFn,
    B: VectorGridFn,
    hall: HallParams,
    u_full: bool = False,
    current: Optional[VectorGridFn] = None,
) -> VectorGridFn:
    """
    Outflow SAT of the induction equation with Hall term,

        M⁻¹Eⱼ ( 1_{v·ν<0} vⱼ Bᵢ + Bⱼ Jᵢ ),   v = u/2 - J,

    where the indicator is evaluated pointwise on each face. ``u_full`` uses
    ``v = u - J`` instead.
    """
    u = grid.check_vector(u)
    B = grid.check_vector(B)
    J = current_density(grid, hall, B) if current is None else current
    v = (u if u_full else 0.5 * u) - J
    out = np.zeros_like(B)
    for j in range(3):
        op = grid.ops[j]
        if op.periodic:
            continue
        for normal, node in FACES:
            face = grid.face_index(j, node)
            vn = normal * v[j][face]
            upwind = np.where(vn < 0.0, v[j][face], 0.0)
            scale = normal / op.boundary_weight
            for i in range(3):
                out[i][face] += scale * (upwind * B[i][face] + B[j][face] * J[i][face])
    return out


class VelocitySampler(object):
    """
    Samples a velocity evaluator onto a grid. Stationary velocities are sampled
    once and reused.
    """

    def __init__(
        self, grid: GridSpec, evaluator: FieldEvaluator, stationary: bool = False
    ) -> None:
        self.grid = grid
        self.evaluator = evaluator
        self.stationary = stationary
        self._cached: Optional[VectorGridFn] = None

    def __call__(self, t: float) -> VectorGridFn:
        if self.stationary:
            if self._cached is None:
                self._cached = self.grid.check_vector(self.grid.sample(self.evaluator, t))
            return self._cached
        return self.grid.check_vector(self.grid.sample(self.evaluator, t))


def rhs(
    grid: GridSpec,
    forms: FormSelection,
    bc: BoundaryCondition,
    hall: Optional[HallParams],
    u_eval: Callable[[float], VectorGridFn],
    t: float,
    B: VectorGridFn,
) -> VectorGridFn:
    """
    Full semidiscrete right-hand side: linear volume terms, the Hall term when
    ``hall`` is enabled, and the SAT selected by ``bc``.
    """
    u = u_eval(t)
    out = volume_linear(grid, forms, u, B)
    hall_on = hall is not None and hall.enabled
    current = None
    if hall_on:
        assert hall is not None
        current = current_density(grid, hall, B)
        out += volume_hall(grid, hall, B, current=current)

    if bc.kind is BoundaryKind.LINEAR_INFLOW:
        out += sat_linear_inflow(grid, u, B, bc, t)
    elif bc.kind is BoundaryKind.HALL_OUTFLOW:
        if not hall_on:
            raise BoundaryDataError("Hall outflow boundaries need the Hall term")
        assert hall is not None
        out += sat_hall_outflow(
            grid, u, B, hall, u_full=bc.outflow_u_full, current=current
        )
    return out


def energy_rate(grid: GridSpec, B: VectorGridFn, dB: VectorGridFn) -> float:
    """``d/dt ‖B‖²_M = 2 Σᵢ BᵢᵀM ∂ₜBᵢ``"""
    return 2.0 * inner_m(grid, B, dB)


def make_rhs(
    grid: GridSpec,
    forms: FormSelection,
    bc: BoundaryCondition,
    hall: Optional[HallParams],
    u_eval: Callable[[float], VectorGridFn],
) -> Callable[[float, VectorGridFn], VectorGridFn]:
    """Bind a configuration into the ``(t, B)`` callable used by time stepping."""

    def evaluate(t: float, B: npt.NDArray[np.float64]) -> VectorGridFn:
        return rhs(grid, forms, bc, hall, u_eval, t, B)

    return evaluate


def max_velocity_gradient(grid: GridSpec, u: VectorGridFn) -> float:
    """``max |Dⱼuᵢ|`` over all components, directions and nodes."""
    return max(
        float(np.max(np.abs(apply_axis_d(grid, j, u[i]))))
        for i in range(3)
        for j in range(3)
    )
