"""
Default implementations of the harness callbacks. Each of them can be replaced
on an :class:`~sbp_induction.ExperimentHarness` with the matching loader
decorator (``step_loader``, ``blowup_loader`` and ``sample_loader``).
"""
import logging
import math
from typing import NamedTuple

from sbp_induction.exceptions import SolverBlowUpError
from sbp_induction.fields import divergence
from sbp_induction.fields import energy
from sbp_induction.fields import GridSpec
from sbp_induction.fields import norm_m
from sbp_induction.typing import VectorGridFn

logger = logging.getLogger(__name__)


class SeriesSample(NamedTuple):
    t: float
    energy: float
    div_norm: float


def default_step_callback(t: float, step: int, B: VectorGridFn) -> None:
    logger.debug("step %d reached t=%.6g", step, t)


def default_blowup_callback(error: SolverBlowUpError) -> SeriesSample:
    """
    By default a blow-up is logged and recorded as a NaN row, which is how
    unstable runs show up in the result tables.

    :param error: the exception raised by the time stepper
    """
    logger.warning("Numerical solution blew up: %s", error)
    return SeriesSample(error.t, math.nan, math.nan)


def default_sample_callback(
    grid: GridSpec, t: float, B: VectorGridFn
) -> SeriesSample:
    """Magnetic energy ``‖B‖²_M`` and divergence norm ``‖div B‖_M`` at time ``t``."""
    return SeriesSample(t, energy(grid, B), norm_m(grid, divergence(grid, B)))
