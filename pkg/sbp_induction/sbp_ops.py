"""
Diagonal-norm summation-by-parts (SBP) operators in one space dimension.

An operator is stored as a banded table: a dense block of boundary closure rows
for the left end and the repeated interior stencil. The right closure is the
left one reflected through the centre of the grid, with a sign flip for the
first derivative and without one for the second derivative. Grid spacing is
folded into the coefficients when the operator is built.

All ``apply_*`` functions act along the first axis of their input, so a whole
batch of grid lines can be passed as one array of shape ``(n, ...)``.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict
from typing import Optional
from typing import Tuple

import numpy as np
import numpy.typing as npt

from sbp_induction.exceptions import FieldShapeError
from sbp_induction.exceptions import OperatorError

logger = logging.getLogger(__name__)

Rows = Tuple[Tuple[Fraction, ...], ...]


def _rows(*rows: str) -> Rows:
    return tuple(tuple(Fraction(coeff) for coeff in row.split()) for row in rows)


def _stencil(row: str) -> Tuple[Fraction, ...]:
    return _rows(row)[0]


# Coefficients for unit grid spacing. Closure rows start at the first node.
FIRST_DERIVATIVE_CLOSURES: Dict[int, Rows] = {
    2: _rows("-1 1"),
    4: _rows(
        "-24/17 59/34 -4/17 -3/34",
        "-1/2 0 1/2",
        "4/43 -59/86 0 59/86 -4/43",
        "3/98 0 -59/98 0 32/49 -4/49",
    ),
    6: _rows(
        "-21600/13649 104009/54596 30443/81894 -33311/27298 16863/27298 "
        "-15025/163788",
        "-104009/240260 0 -311/72078 20229/24026 -24337/48052 36661/360390",
        "-30443/162660 311/32532 0 -11155/16266 41287/32532 -21999/54220",
        "33311/107180 -20229/21436 485/1398 0 4147/21436 25427/321540 72/5359",
        "-16863/78770 24337/31508 -41287/47262 -4147/15754 0 342523/472620 "
        "-1296/7877 144/7877",
        "15025/525612 -36661/262806 21999/87602 -25427/262806 -342523/525612 0 "
        "32400/43801 -6480/43801 720/43801",
    ),
}

FIRST_DERIVATIVE_STENCILS: Dict[int, Tuple[Fraction, ...]] = {
    2: _stencil("-1/2 0 1/2"),
    4: _stencil("1/12 -2/3 0 2/3 -1/12"),
    6: _stencil("-1/60 3/20 -3/4 0 3/4 -3/20 1/60"),
}

NORM_CLOSURES: Dict[int, Tuple[Fraction, ...]] = {
    2: _stencil("1/2"),
    4: _stencil("17/48 59/48 43/48 49/48"),
    6: _stencil("13649/43200 12013/8640 2711/4320 5359/4320 7877/8640 43801/43200"),
}

# Narrow-stencil second derivatives sharing the norm of the first derivative.
SECOND_DERIVATIVE_CLOSURES: Dict[int, Rows] = {
    2: _rows("1 -2 1"),
    4: _rows(
        "2 -5 4 -1",
        "1 -2 1",
        "-4/43 59/43 -110/43 59/43 -4/43",
        "-1/49 0 59/49 -118/49 64/49 -4/49",
    ),
}

SECOND_DERIVATIVE_STENCILS: Dict[int, Tuple[Fraction, ...]] = {
    2: _stencil("1 -2 1"),
    4: _stencil("-1/12 4/3 -5/2 4/3 -1/12"),
    6: _stencil("1/90 -3/20 3/2 -49/18 3/2 -3/20 1/90"),
}

# The order 6 closure is derived below. The narrow interior stencil minus the
# square of the first derivative stencil equals -Σ cₖ (Δᵏ)ᵀΔᵏ, with Δᵏ the k-th
# undivided difference and the weights cₖ listed here.
NARROW_REMAINDER_WEIGHTS: Dict[int, Dict[int, Fraction]] = {
    6: {4: Fraction(1, 80), 5: Fraction(1, 600), 6: Fraction(1, 3600)},
}

BOUNDARY_DERIVATIVES: Dict[int, Tuple[Fraction, ...]] = {
    6: _stencil("-25/12 4 -3 4/3 -1/4"),
}

SUPPORTED_ORDERS = tuple(sorted(FIRST_DERIVATIVE_STENCILS))


def _left_banded(rows: Rows, stencil: Tuple[Fraction, ...], size: int) -> np.ndarray:
    """Exact ``size x size`` matrix with the left closure and the interior stencil."""
    matrix = np.zeros((size, size), dtype=object)
    half = len(stencil) // 2
    for i in range(size):
        if i < len(rows):
            matrix[i, : len(rows[i])] = rows[i]
            continue
        for offset, coeff in enumerate(stencil, start=-half):
            if 0 <= i + offset < size:
                matrix[i, i + offset] = coeff
    return matrix


def _compatible_closure(order: int, size: int = 24) -> Rows:
    """
    Left closure of ``D2 = D D + M⁻¹E(S - D) - M⁻¹R`` for unit spacing, where
    S is the one-sided boundary derivative of :data:`BOUNDARY_DERIVATIVES` and
    ``R = Σ cₖ (Δᵏ)ᵀΔᵏ``. Then ``M D2 = -DᵀMD + E S - R`` with R symmetric
    positive semidefinite, and the rows away from the boundary reduce to the
    narrow interior stencil.
    """
    d = _left_banded(
        FIRST_DERIVATIVE_CLOSURES[order], FIRST_DERIVATIVE_STENCILS[order], size
    )
    weights = np.ones(size, dtype=object)
    weights[: len(NORM_CLOSURES[order])] = NORM_CLOSURES[order]
    boundary = np.zeros(size, dtype=object)
    boundary[: len(BOUNDARY_DERIVATIVES[order])] = BOUNDARY_DERIVATIVES[order]

    d2 = d @ d
    d2[0] -= (boundary - d[0]) / weights[0]
    identity = np.eye(size, dtype=int).astype(object)
    for k, weight in NARROW_REMAINDER_WEIGHTS[order].items():
        diff = np.diff(identity, k, axis=0)
        d2 -= weight * (diff.T @ diff) / weights[:, np.newaxis]

    # Only the left end is meaningful, the right end lacks its closure.
    narrow = _left_banded((), SECOND_DERIVATIVE_STENCILS[order], size)
    differs = [i for i in range(size // 2) if any(d2[i] != narrow[i])]
    rows = differs[-1] + 1
    width = max(j for i in range(rows) for j in range(size) if d2[i, j] != 0) + 1
    return tuple(tuple(Fraction(coeff) for coeff in d2[i, :width]) for i in range(rows))


SECOND_DERIVATIVE_CLOSURES[6] = _compatible_closure(6)


def _block(rows: Rows) -> npt.NDArray[np.float64]:
    width = max(len(row) for row in rows)
    block = np.zeros((len(rows), width))
    for i, row in enumerate(rows):
        block[i, : len(row)] = [float(coeff) for coeff in row]
    return block


def _array(coeffs: Tuple[Fraction, ...]) -> npt.NDArray[np.float64]:
    return np.array([float(coeff) for coeff in coeffs])


@dataclass(frozen=True, eq=False)
class SbpOp1D:
    """
    One-dimensional SBP operator bundle on a uniform grid.

    ``d_closure`` holds the left boundary rows of D, ``d_stencil`` the interior
    stencil centred on the diagonal. ``m_weights`` is the diagonal of the norm
    matrix M. The ``d2_*`` tables describe the compatible second derivative and
    may be absent. Periodic operators carry no closures.
    """

    order: int
    n: int
    dx: float
    d_closure: npt.NDArray[np.float64]
    d_stencil: npt.NDArray[np.float64]
    m_weights: npt.NDArray[np.float64]
    d2_closure: Optional[npt.NDArray[np.float64]] = None
    d2_stencil: Optional[npt.NDArray[np.float64]] = None
    periodic: bool = False

    @property
    def closure_rows(self) -> int:
        return self.d_closure.shape[0]

    @property
    def boundary_weight(self) -> float:
        """Norm weight of the boundary nodes (both ends share it)."""
        return float(self.m_weights[0])

    @property
    def has_d2(self) -> bool:
        return self.d2_stencil is not None


def minimum_nodes(order: int) -> int:
    """Fewest nodes for which the left and right closures do not overlap."""
    rows = max(
        len(FIRST_DERIVATIVE_CLOSURES[order]), len(SECOND_DERIVATIVE_CLOSURES[order])
    )
    return 2 * rows + 1


def build_sbp(order: int, n: int, dx: float) -> SbpOp1D:
    """
    Build the diagonal-norm SBP operator of the given interior order.

    :param order:
        Interior order of accuracy, one of 2, 4 or 6.
    :param n:
        Number of nodes including both end points.
    :param dx:
        Grid spacing.
    :return:
        An :class:`SbpOp1D` with first derivative, norm and compatible
        narrow-stencil second derivative.
    """
    if order not in SUPPORTED_ORDERS:
        raise OperatorError(
            f"Unsupported SBP order {order}, expected one of {SUPPORTED_ORDERS}"
        )
    if not dx > 0:
        raise OperatorError(f"Grid spacing must be positive, got {dx}")

    if n < minimum_nodes(order):
        raise OperatorError(
            f"The order {order} operator needs at least {minimum_nodes(order)} "
            f"nodes, got {n}"
        )
    closure = _block(FIRST_DERIVATIVE_CLOSURES[order])
    d2_closure = _block(SECOND_DERIVATIVE_CLOSURES[order])

    weights = _array(NORM_CLOSURES[order])
    m_weights = np.ones(n)
    m_weights[: weights.size] = weights
    m_weights[n - weights.size :] = weights[::-1]

    logger.debug("Built order %d SBP operator with %d nodes, dx=%g", order, n, dx)
    return SbpOp1D(
        order=order,
        n=n,
        dx=dx,
        d_closure=closure / dx,
        d_stencil=_array(FIRST_DERIVATIVE_STENCILS[order]) / dx,
        m_weights=m_weights * dx,
        d2_closure=d2_closure / dx**2,
        d2_stencil=_array(SECOND_DERIVATIVE_STENCILS[order]) / dx**2,
    )


def build_periodic(order: int, n: int, dx: float) -> SbpOp1D:
    """
    Build the centred periodic operator of the given interior order. Its norm
    is ``dx`` times the identity and the SBP boundary matrix vanishes.
    """
    if order not in SUPPORTED_ORDERS:
        raise OperatorError(
            f"Unsupported SBP order {order}, expected one of {SUPPORTED_ORDERS}"
        )
    if not dx > 0:
        raise OperatorError(f"Grid spacing must be positive, got {dx}")
    stencil = _array(FIRST_DERIVATIVE_STENCILS[order])
    if n < stencil.size:
        raise OperatorError(
            f"The periodic order {order} operator needs at least "
            f"{stencil.size} nodes, got {n}"
        )
    return SbpOp1D(
        order=order,
        n=n,
        dx=dx,
        d_closure=np.zeros((0, 0)),
        d_stencil=stencil / dx,
        m_weights=np.full(n, dx),
        d2_closure=np.zeros((0, 0)),
        d2_stencil=_array(SECOND_DERIVATIVE_STENCILS[order]) / dx**2,
        periodic=True,
    )


def _as_line(op: SbpOp1D, line: npt.ArrayLike) -> npt.NDArray[np.float64]:
    values = np.asarray(line, dtype=float)
    if values.ndim == 0 or values.shape[0] != op.n:
        raise FieldShapeError(
            f"Expected {op.n} nodes along the operator axis, got shape {values.shape}"
        )
    return values


def _weights(op: SbpOp1D, ndim: int) -> npt.NDArray[np.float64]:
    return op.m_weights.reshape((-1,) + (1,) * (ndim - 1))


def _apply_banded(
    closure: npt.NDArray[np.float64],
    stencil: npt.NDArray[np.float64],
    parity: float,
    values: npt.NDArray[np.float64],
    periodic: bool,
) -> npt.NDArray[np.float64]:
    half = stencil.size // 2
    if periodic:
        out = np.zeros(values.shape)
        for offset, coeff in enumerate(stencil, start=-half):
            if coeff != 0.0:
                out += coeff * np.roll(values, -offset, axis=0)
        return out

    n = values.shape[0]
    rows, width = closure.shape
    out = np.empty(values.shape)
    interior = out[rows : n - rows]
    interior[...] = 0.0
    for offset, coeff in enumerate(stencil, start=-half):
        if coeff != 0.0:
            interior += coeff * values[rows + offset : n - rows + offset]
    out[:rows] = np.tensordot(closure, values[:width], axes=(1, 0))
    mirrored = np.tensordot(closure, values[::-1][:width], axes=(1, 0))
    out[n - rows :] = parity * mirrored[::-1]
    return out


def apply_d(op: SbpOp1D, line: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Apply the first-derivative operator D."""
    values = _as_line(op, line)
    return _apply_banded(op.d_closure, op.d_stencil, -1.0, values, op.periodic)


def apply_dstar(op: SbpOp1D, line: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """
    Apply the M-adjoint ``D* = M⁻¹DᵀM``. The SBP property gives
    ``D* = M⁻¹E - D``, which is what is evaluated here.
    """
    values = _as_line(op, line)
    out = -_apply_banded(op.d_closure, op.d_stencil, -1.0, values, op.periodic)
    if not op.periodic:
        out[0] -= values[0] / op.m_weights[0]
        out[-1] += values[-1] / op.m_weights[-1]
    return out


def apply_d_transpose(op: SbpOp1D, line: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Apply the plain transpose Dᵀ."""
    values = _as_line(op, line)
    weights = _weights(op, values.ndim)
    return weights * apply_dstar(op, values / weights)


def apply_d2(op: SbpOp1D, line: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Apply the compatible narrow-stencil second-derivative operator."""
    if op.d2_stencil is None or op.d2_closure is None:
        raise OperatorError(
            f"The order {op.order} operator has no second derivative attached"
        )
    values = _as_line(op, line)
    return _apply_banded(op.d2_closure, op.d2_stencil, 1.0, values, op.periodic)


def apply_ddstar(op: SbpOp1D, line: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """
    Apply ``D D* = D M⁻¹ Dᵀ M``, the wide-stencil operator of the least-norm
    divergence correction. It is self-adjoint and positive semidefinite with
    respect to the M inner product.
    """
    return apply_d(op, apply_dstar(op, line))


def sbp_residual(op: SbpOp1D) -> float:
    """
    Largest entry of ``M D + Dᵀ M - E`` after scaling D by ``dx``. Builds dense
    matrices, so it is meant for diagnostics on moderate ``n``.
    """
    identity = np.eye(op.n)
    d = apply_d(op, identity) * op.dx
    m = np.diag(op.m_weights / op.dx)
    boundary = np.zeros((op.n, op.n))
    if not op.periodic:
        boundary[0, 0] = -1.0
        boundary[-1, -1] = 1.0
    return float(np.max(np.abs(m @ d + d.T @ m - boundary)))
