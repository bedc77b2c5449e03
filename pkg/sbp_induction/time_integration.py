"""
Low-storage explicit Runge-Kutta time stepping and CFL step-size selection.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import numpy.typing as npt

from sbp_induction.exceptions import ConfigurationError
from sbp_induction.exceptions import SolverBlowUpError
from sbp_induction.fields import GridSpec
from sbp_induction.typing import RhsFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LsrkScheme:
    """
    2N-storage Runge-Kutta scheme. Stage k updates the register
    ``du = a_k du + dt f(t + c_k dt, y)`` and then ``y = y + b_k du``.
    """

    name: str
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]

    @property
    def stages(self) -> int:
        return len(self.b)


# Five-stage, fourth-order scheme of Carpenter and Kennedy (1994).
CARPENTER_KENNEDY_4_5 = LsrkScheme(
    name="ck45",
    a=(
        0.0,
        -567301805773.0 / 1357537059087.0,
        -2404267990393.0 / 2016746695238.0,
        -3550918686646.0 / 2091501179385.0,
        -1275806237668.0 / 842570457699.0,
    ),
    b=(
        1432997174477.0 / 9575080441755.0,
        5161836677717.0 / 13612068292357.0,
        1720146321549.0 / 2090206949498.0,
        3134564353537.0 / 4481467310338.0,
        2277821191437.0 / 14882151754819.0,
    ),
    c=(
        0.0,
        1432997174477.0 / 9575080441755.0,
        2526269341429.0 / 6820363962896.0,
        2006345519317.0 / 3224310063776.0,
        2802321613138.0 / 2924317926251.0,
    ),
)


@dataclass(frozen=True)
class StepControl:
    """
    CFL step-size control. With ``hall_mode`` the CFL number is divided by the
    number of nodes per direction.
    """

    cfl: float = 0.95
    hall_mode: bool = False

    def __post_init__(self) -> None:
        if not self.cfl > 0:
            raise ConfigurationError(f"CFL number must be positive, got {self.cfl}")

    def effective_cfl(self, grid: GridSpec) -> float:
        if self.hall_mode:
            return self.cfl / max(grid.n_per_axis)
        return self.cfl


def compute_dt(
    ctrl: StepControl,
    grid: GridSpec,
    u: npt.NDArray[np.float64],
    t_remaining: float,
) -> float:
    """
    Step size ``cfl * min(dx) / max|u|``, clipped so that the final time is
    hit exactly. ``max|u|`` is the largest absolute value of any velocity
    component at any node. Without any velocity the remaining time is
    returned.
    """
    umax = float(np.max(np.abs(u))) if np.size(u) else 0.0
    if not umax > 0:
        logger.warning(
            "max|u| is zero, taking the remaining time %g as step", t_remaining
        )
        return t_remaining
    dt = ctrl.effective_cfl(grid) * grid.min_dx / umax
    return min(dt, t_remaining)


def lsrk_step(
    scheme: LsrkScheme,
    rhs_fn: RhsFunction,
    t: float,
    dt: float,
    state: npt.NDArray[np.float64],
    step: int = 0,
) -> npt.NDArray[np.float64]:
    """
    Advance ``state`` from ``t`` to ``t + dt``. The input array is not
    modified.

    :raises SolverBlowUpError:
        When the new state holds non-finite values.
    """
    y = np.array(state, dtype=float)
    du = np.zeros_like(y)
    for a, b, c in zip(scheme.a, scheme.b, scheme.c):
        du *= a
        du += dt * rhs_fn(t + c * dt, y)
        y += b * du
    if not np.all(np.isfinite(y)):
        raise SolverBlowUpError(
            f"Non-finite state after step {step} at t={t + dt:g} (dt={dt:g})",
            t=t + dt,
            step=step,
        )
    return y
