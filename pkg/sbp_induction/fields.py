"""
Three-dimensional Cartesian grids built from tensor products of 1D SBP
operators, together with discrete vector calculus, M-weighted norms, boundary
lifting operators and grid-function dumps.

Grid functions are plain numpy arrays. A scalar function has shape
``(n1, n2, n3)`` and a vector function ``(3, n1, n2, n3)``; both are indexed
``[i1, i2, i3]``. Flat dumps use Fortran order so that x1 runs fastest.
"""
import csv
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np
import numpy.typing as npt

from sbp_induction.exceptions import FieldShapeError
from sbp_induction.exceptions import GridError
from sbp_induction.exceptions import NonFiniteFieldError
from sbp_induction.sbp_ops import apply_d
from sbp_induction.sbp_ops import build_periodic
from sbp_induction.sbp_ops import build_sbp
from sbp_induction.sbp_ops import SbpOp1D
from sbp_induction.typing import ScalarGridFn
from sbp_induction.typing import VectorGridFn

logger = logging.getLogger(__name__)

Triple = Tuple[float, float, float]
LineOperator = Callable[[SbpOp1D, npt.NDArray[np.float64]], npt.NDArray[np.float64]]

# Outward normal sign and node index of the two faces of an axis.
FACES = ((-1.0, 0), (1.0, -1))


def _triple(value: Union[float, int, Sequence], name: str) -> tuple:
    if np.isscalar(value):
        return (value, value, value)
    value = tuple(value)
    if len(value) != 3:
        raise GridError(f"{name} needs one entry per axis, got {value}")
    return value


@dataclass(frozen=True, eq=False)
class GridSpec:
    """
    Node layout of a box ``[lo, hi]`` with one 1D operator per axis.

    Non-periodic axes contain both end points (``dx = L / (n - 1)``); periodic
    axes drop the duplicate end point (``dx = L / n``).
    """

    n_per_axis: Tuple[int, int, int]
    lo: Triple
    hi: Triple
    periodic: Tuple[bool, bool, bool]
    ops: Tuple[SbpOp1D, SbpOp1D, SbpOp1D]

    @classmethod
    def build(
        cls,
        order: int,
        n_per_axis: Union[int, Sequence[int]],
        lo: Union[float, Sequence[float]] = 0.0,
        hi: Union[float, Sequence[float]] = 1.0,
        periodic: Union[bool, Sequence[bool]] = False,
    ) -> "GridSpec":
        sizes = tuple(int(n) for n in _triple(n_per_axis, "n_per_axis"))
        lows = tuple(float(x) for x in _triple(lo, "lo"))
        highs = tuple(float(x) for x in _triple(hi, "hi"))
        flags = tuple(bool(p) for p in _triple(periodic, "periodic"))

        ops = []
        for n, a, b, wrap in zip(sizes, lows, highs, flags):
            if not b > a:
                raise GridError(f"Empty axis interval [{a}, {b}]")
            if wrap:
                ops.append(build_periodic(order, n, (b - a) / n))
            else:
                if n < 2:
                    raise GridError(f"A bounded axis needs at least 2 nodes, got {n}")
                ops.append(build_sbp(order, n, (b - a) / (n - 1)))
        return cls(sizes, lows, highs, flags, tuple(ops))  # type: ignore[arg-type]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.n_per_axis

    @property
    def order(self) -> int:
        return self.ops[0].order

    @property
    def dx(self) -> Triple:
        return tuple(op.dx for op in self.ops)  # type: ignore[return-value]

    @property
    def min_dx(self) -> float:
        return min(self.dx)

    @property
    def fully_periodic(self) -> bool:
        return all(self.periodic)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def axis_nodes(self, axis: int) -> npt.NDArray[np.float64]:
        return self.lo[axis] + self.dx[axis] * np.arange(self.n_per_axis[axis])

    @cached_property
    def coordinates(self) -> Tuple[ScalarGridFn, ScalarGridFn, ScalarGridFn]:
        x, y, z = np.meshgrid(*(self.axis_nodes(a) for a in range(3)), indexing="ij")
        return x, y, z

    @cached_property
    def mass_weights(self) -> ScalarGridFn:
        """Quadrature weights of ``M = M_x ⊗ M_y ⊗ M_z`` at every node."""
        mx, my, mz = (op.m_weights for op in self.ops)
        return np.einsum("i,j,k->ijk", mx, my, mz)

    def face_weights(self, axis: int) -> npt.NDArray[np.float64]:
        """Quadrature weights of the faces normal to ``axis``."""
        others = [self.ops[a].m_weights for a in range(3) if a != axis]
        return np.outer(others[0], others[1])

    def face_index(self, axis: int, node: int) -> tuple:
        return (slice(None),) * axis + (node,)

    def face_coordinates(self, axis: int, node: int) -> Tuple[ScalarGridFn, ...]:
        index = self.face_index(axis, node)
        return tuple(c[index] for c in self.coordinates)

    def sample(self, evaluator: Callable, t: float) -> VectorGridFn:
        """Evaluate a ``(t, x, y, z)`` field evaluator at every node."""
        return np.asarray(evaluator(t, *self.coordinates), dtype=float)

    def check_scalar(self, f: npt.ArrayLike) -> ScalarGridFn:
        values = np.asarray(f, dtype=float)
        if values.shape != self.shape:
            raise FieldShapeError(
                f"Expected a scalar grid function of shape {self.shape}, "
                f"got {values.shape}"
            )
        return values

    def check_vector(self, f: npt.ArrayLike) -> VectorGridFn:
        values = np.asarray(f, dtype=float)
        if values.shape != (3,) + self.shape:
            raise FieldShapeError(
                f"Expected a vector grid function of shape {(3,) + self.shape}, "
                f"got {values.shape}"
            )
        return values


def check_finite(f: npt.NDArray[np.float64], what: str = "grid function") -> None:
    if not np.all(np.isfinite(f)):
        raise NonFiniteFieldError(f"The {what} contains non-finite values")


def apply_axis(
    grid: GridSpec, axis: int, f: ScalarGridFn, operator: LineOperator = apply_d
) -> ScalarGridFn:
    """Apply a 1D operator of ``sbp_ops`` along ``axis`` to every grid line."""
    values = grid.check_scalar(f)
    lines = np.moveaxis(values, axis, 0)
    return np.moveaxis(operator(grid.ops[axis], lines), 0, axis)


def apply_axis_d(grid: GridSpec, axis: int, f: ScalarGridFn) -> ScalarGridFn:
    return apply_axis(grid, axis, f, apply_d)


def divergence(grid: GridSpec, B: VectorGridFn) -> ScalarGridFn:
    B = grid.check_vector(B)
    return (
        apply_axis_d(grid, 0, B[0])
        + apply_axis_d(grid, 1, B[1])
        + apply_axis_d(grid, 2, B[2])
    )


def curl(grid: GridSpec, B: VectorGridFn) -> VectorGridFn:
    """``(D × B)_i = ε_ijk D_j B_k``"""
    B = grid.check_vector(B)
    d = apply_axis_d
    return np.stack(
        [
            d(grid, 1, B[2]) - d(grid, 2, B[1]),
            d(grid, 2, B[0]) - d(grid, 0, B[2]),
            d(grid, 0, B[1]) - d(grid, 1, B[0]),
        ]
    )


def gradient(grid: GridSpec, phi: ScalarGridFn) -> VectorGridFn:
    return np.stack([apply_axis_d(grid, axis, phi) for axis in range(3)])


def inner_m(grid: GridSpec, f: npt.ArrayLike, g: npt.ArrayLike) -> float:
    """
    Discrete L² inner product ``fᵀ M g``. Vector grid functions are summed over
    their components.
    """
    product = np.asarray(f, dtype=float) * np.asarray(g, dtype=float)
    if product.ndim == 4:
        product = product.sum(axis=0)
    return float(np.sum(grid.check_scalar(product) * grid.mass_weights))


def norm_m(grid: GridSpec, f: npt.ArrayLike) -> float:
    return float(np.sqrt(inner_m(grid, f, f)))


def energy(grid: GridSpec, B: VectorGridFn) -> float:
    """Magnetic energy ``‖B‖²_M``."""
    return inner_m(grid, grid.check_vector(B), B)


def boundary_lift(
    grid: GridSpec, axis: int, data: ScalarGridFn, absolute: bool = False
) -> ScalarGridFn:
    """
    Apply ``M⁻¹E_j`` (or ``M⁻¹|E_j|`` with ``absolute``) along ``axis``.

    Only the face values of ``data`` are read. The result vanishes away from
    the two faces and on periodic axes.
    """
    values = grid.check_scalar(data)
    out = np.zeros(grid.shape)
    op = grid.ops[axis]
    if op.periodic:
        return out
    for normal, node in FACES:
        index = grid.face_index(axis, node)
        sign = 1.0 if absolute else normal
        out[index] = sign * values[index] / op.boundary_weight
    return out


def face_integral(
    grid: GridSpec, axis: int, values: ScalarGridFn, signed: bool = True
) -> float:
    """
    Quadrature of ``values`` over both faces normal to ``axis``; ``signed``
    multiplies each face by its outward normal component.
    """
    values = grid.check_scalar(values)
    if grid.ops[axis].periodic:
        return 0.0
    weights = grid.face_weights(axis)
    total = 0.0
    for normal, node in FACES:
        sign = normal if signed else 1.0
        total += sign * float(np.sum(weights * values[grid.face_index(axis, node)]))
    return total


def _components(f: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    return f[np.newaxis] if f.ndim == 3 else f


def dump_binary(path: Union[str, Path], f: npt.ArrayLike) -> None:
    """
    Write a grid function as an ``int64`` header ``(n1, n2, n3, components)``
    followed by little-endian doubles with x1 fastest.
    """
    values = _components(np.asarray(f, dtype=float))
    check_finite(values)
    header = np.array(values.shape[1:] + values.shape[:1], dtype="<i8")
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        for component in values:
            fh.write(component.astype("<f8").tobytes(order="F"))


def load_binary(path: Union[str, Path]) -> npt.NDArray[np.float64]:
    raw = Path(path).read_bytes()
    n1, n2, n3, components = (int(v) for v in np.frombuffer(raw[:32], dtype="<i8"))
    data = np.frombuffer(raw[32:], dtype="<f8")
    if data.size != n1 * n2 * n3 * components:
        raise FieldShapeError(f"{path} holds {data.size} values, header disagrees")
    values = np.stack(
        [c.reshape((n1, n2, n3), order="F") for c in data.reshape(components, -1)]
    ).astype(float)
    check_finite(values)
    return values[0] if components == 1 else values


def dump_csv(path: Union[str, Path], grid: GridSpec, f: npt.ArrayLike) -> None:
    """Write ``x,y,z`` plus one column per component, one node per row."""
    values = _components(np.asarray(f, dtype=float))
    check_finite(values)
    names = ["f"] if values.shape[0] == 1 else [f"f{i + 1}" for i in range(3)]
    columns = [c.ravel(order="F") for c in grid.coordinates]
    columns += [component.ravel(order="F") for component in values]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "z"] + names)
        writer.writerows(zip(*(col.tolist() for col in columns)))
