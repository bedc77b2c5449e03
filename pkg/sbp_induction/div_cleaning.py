"""
Projection-based divergence cleaning of the magnetic field.

Three projections are available:

* ``ws-d0``: solve ``-Σⱼ DⱼDⱼ φ = div B`` at the interior nodes with ``φ = 0``
  on the boundary, then ``B ← B + grad φ``.
* ``ns-d0``: the same with the narrow-stencil second derivatives ``D⁽²⁾ⱼ``.
* ``ws-ln``: the least-norm correction ``β = div* φ`` with
  ``(div div*) φ = -div B`` on all nodes, then ``B ← B + β``.

All linear systems are solved matrix-free by unpreconditioned conjugate
gradients in the M inner product.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable
from typing import List
from typing import NamedTuple
from typing import Tuple

import numpy as np
import numpy.typing as npt

from sbp_induction.exceptions import CleaningError
from sbp_induction.exceptions import ConfigurationError
from sbp_induction.fields import apply_axis
from sbp_induction.fields import divergence
from sbp_induction.fields import energy
from sbp_induction.fields import gradient
from sbp_induction.fields import GridSpec
from sbp_induction.fields import inner_m
from sbp_induction.fields import norm_m
from sbp_induction.sbp_ops import apply_d
from sbp_induction.sbp_ops import apply_d2
from sbp_induction.sbp_ops import apply_dstar
from sbp_induction.typing import InnerProduct
from sbp_induction.typing import LinearOperator
from sbp_induction.typing import ScalarGridFn
from sbp_induction.typing import VectorGridFn

logger = logging.getLogger(__name__)


class CleanMethod(str, Enum):
    NONE = "none"
    WS_LEAST_NORM = "ws-ln"
    WS_DIRICHLET0 = "ws-d0"
    NS_DIRICHLET0 = "ns-d0"

    @property
    def dirichlet(self) -> bool:
        return self in (CleanMethod.WS_DIRICHLET0, CleanMethod.NS_DIRICHLET0)


@dataclass(frozen=True)
class DivCleanConfig:
    method: CleanMethod = CleanMethod.NONE
    tol: float = 1e-3
    max_iter: int = 50

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "method", CleanMethod(self.method))
        except ValueError:
            choices = ", ".join(m.value for m in CleanMethod)
            raise ConfigurationError(
                f"Unknown cleaning method {self.method!r}, expected one of {choices}"
            ) from None
        if not self.tol > 0:
            raise ConfigurationError(
                f"Cleaning tolerance must be positive, got {self.tol}"
            )
        if self.max_iter < 1:
            raise ConfigurationError(
                f"Cleaning needs at least one CG iteration, got {self.max_iter}"
            )


class CGResult(NamedTuple):
    solution: npt.NDArray[np.float64]
    iterations: int
    residual_history: List[float]
    breakdown: bool


def cg_solve(
    apply_A: LinearOperator,
    rhs: npt.ArrayLike,
    inner_product: InnerProduct,
    tol_residual: float,
    max_iter: int,
) -> CGResult:
    """
    Unpreconditioned conjugate gradients starting from zero.

    ``apply_A`` must be self-adjoint and positive semidefinite with respect to
    ``inner_product``, and ``rhs`` orthogonal to its kernel. Iteration stops
    once the residual norm drops to ``tol_residual`` or after ``max_iter``
    iterations. A direction with non-positive curvature stops the iteration
    and sets ``breakdown``; the iterate reached so far is returned.

    :raises CleaningError:
        When non-finite values show up.
    """
    b = np.asarray(rhs, dtype=float)
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rr = inner_product(r, r)
    if not np.isfinite(rr):
        raise CleaningError("Non-finite right-hand side passed to CG")
    history = [float(np.sqrt(max(rr, 0.0)))]
    iterations = 0
    breakdown = False

    while history[-1] > tol_residual and iterations < max_iter:
        Ap = apply_A(p)
        pAp = inner_product(p, Ap)
        if not np.isfinite(pAp):
            raise CleaningError(f"Non-finite curvature in CG iteration {iterations + 1}")
        if pAp <= 0.0:
            logger.warning(
                "CG breakdown in iteration %d: curvature %g", iterations + 1, pAp
            )
            breakdown = True
            break
        alpha = rr / pAp
        x += alpha * p
        r -= alpha * Ap
        rr_new = inner_product(r, r)
        if not np.isfinite(rr_new):
            raise CleaningError(f"Non-finite residual in CG iteration {iterations + 1}")
        iterations += 1
        history.append(float(np.sqrt(max(rr_new, 0.0))))
        p = r + (rr_new / rr) * p
        rr = rr_new

    logger.debug("CG finished after %d iterations, residual %g", iterations, history[-1])
    return CGResult(x, iterations, history, breakdown)


@dataclass(frozen=True)
class CleanStats:
    method: CleanMethod
    iterations: int
    div_before: float
    div_after: float
    mass_change: Tuple[float, float, float]
    energy_change: float
    breakdown: bool = False
    skipped: bool = False


@dataclass(frozen=True)
class CleanSummary:
    calls: int = 0
    cleaned: int = 0
    total_iterations: int = 0
    max_iterations: int = 0
    breakdowns: int = 0
    energy_change: float = 0.0
    max_mass_change: float = 0.0


def aggregate_stats(stats: Iterable[CleanStats]) -> CleanSummary:
    """Sum up the statistics of the cleaning calls of one run."""
    stats = list(stats)
    cleaned = [s for s in stats if not s.skipped]
    return CleanSummary(
        calls=len(stats),
        cleaned=len(cleaned),
        total_iterations=sum(s.iterations for s in cleaned),
        max_iterations=max((s.iterations for s in cleaned), default=0),
        breakdowns=sum(1 for s in cleaned if s.breakdown),
        energy_change=float(sum(s.energy_change for s in cleaned)),
        max_mass_change=max(
            (max(abs(m) for m in s.mass_change) for s in cleaned), default=0.0
        ),
    )


def interior_mask(grid: GridSpec) -> ScalarGridFn:
    """1 at nodes off every boundary face, 0 on the faces."""
    mask = np.zeros(grid.shape)
    mask[1:-1, 1:-1, 1:-1] = 1.0
    return mask


def divergence_star(grid: GridSpec, phi: ScalarGridFn) -> VectorGridFn:
    """``(div* φ)ⱼ = M⁻¹DⱼᵀM φ``, the M-adjoint of the divergence."""
    return np.stack([apply_axis(grid, j, phi, apply_dstar) for j in range(3)])


def _ddstar_sum(grid: GridSpec, phi: ScalarGridFn) -> ScalarGridFn:
    return divergence(grid, divergence_star(grid, phi))


def _wide_laplacian(grid: GridSpec, phi: ScalarGridFn) -> ScalarGridFn:
    return sum(
        apply_axis(grid, j, apply_axis(grid, j, phi, apply_d), apply_d) for j in range(3)
    )


def _narrow_laplacian(grid: GridSpec, phi: ScalarGridFn) -> ScalarGridFn:
    return sum(apply_axis(grid, j, phi, apply_d2) for j in range(3))


def _mass(grid: GridSpec, B: VectorGridFn) -> npt.NDArray[np.float64]:
    return np.array([inner_m(grid, np.ones(grid.shape), B[i]) for i in range(3)])


def _solve_dirichlet(
    grid: GridSpec, cfg: DivCleanConfig, B: VectorGridFn
) -> Tuple[VectorGridFn, CGResult]:
    if any(grid.periodic):
        raise CleaningError(
            f"Cleaning method {cfg.method.value} needs boundary nodes on every axis"
        )
    if min(grid.shape) < 3:
        raise CleaningError("Dirichlet cleaning needs interior nodes on every axis")
    mask = interior_mask(grid)
    laplacian = (
        _wide_laplacian if cfg.method is CleanMethod.WS_DIRICHLET0 else _narrow_laplacian
    )

    def apply_A(phi: ScalarGridFn) -> ScalarGridFn:
        return -mask * laplacian(grid, mask * phi)

    result = cg_solve(
        apply_A,
        mask * divergence(grid, B),
        lambda f, g: inner_m(grid, f, g),
        cfg.tol,
        cfg.max_iter,
    )
    return B + gradient(grid, mask * result.solution), result


def _solve_least_norm(
    grid: GridSpec, cfg: DivCleanConfig, B: VectorGridFn
) -> Tuple[VectorGridFn, CGResult]:
    result = cg_solve(
        lambda phi: _ddstar_sum(grid, phi),
        -divergence(grid, B),
        lambda f, g: inner_m(grid, f, g),
        cfg.tol,
        cfg.max_iter,
    )
    return B + divergence_star(grid, result.solution), result


def clean(
    grid: GridSpec, cfg: DivCleanConfig, B: VectorGridFn
) -> Tuple[VectorGridFn, CleanStats]:
    """
    Remove (part of) the discrete divergence of ``B``. The input is never
    modified. Fields whose divergence norm already lies below ``cfg.tol`` are
    returned unchanged.

    :raises CleaningError:
        For Dirichlet methods on grids with a periodic axis, and when CG runs
        into non-finite values.
    """
    B = grid.check_vector(B)
    div_before = norm_m(grid, divergence(grid, B))
    if cfg.method is CleanMethod.NONE or div_before <= cfg.tol:
        stats = CleanStats(
            cfg.method, 0, div_before, div_before, (0.0, 0.0, 0.0), 0.0, skipped=True
        )
        return B.copy(), stats

    if cfg.method.dirichlet:
        cleaned, result = _solve_dirichlet(grid, cfg, B)
    else:
        cleaned, result = _solve_least_norm(grid, cfg, B)

    if not np.all(np.isfinite(cleaned)):
        raise CleaningError("Divergence cleaning produced non-finite values")
    if result.residual_history[-1] > cfg.tol and not result.breakdown:
        logger.warning(
            "Cleaning with %s stopped at the iteration cap %d, residual %g",
            cfg.method.value,
            cfg.max_iter,
            result.residual_history[-1],
        )

    mass_change = _mass(grid, cleaned) - _mass(grid, B)
    stats = CleanStats(
        method=cfg.method,
        iterations=result.iterations,
        div_before=div_before,
        div_after=norm_m(grid, divergence(grid, cleaned)),
        mass_change=tuple(float(m) for m in mass_change),  # type: ignore[arg-type]
        energy_change=energy(grid, cleaned) - energy(grid, B),
        breakdown=result.breakdown,
    )
    return cleaned, stats
