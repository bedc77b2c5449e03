import logging
import math
import time
from dataclasses import dataclass
from dataclasses import field
from typing import Callable
from typing import List
from typing import Mapping
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from flask import Config

from sbp_induction.analytic_solutions import ExperimentCase
from sbp_induction.config import ENV_PREFIX
from sbp_induction.config import load_json_file
from sbp_induction.config import new_config
from sbp_induction.config import RunConfig
from sbp_induction.default_callbacks import default_blowup_callback
from sbp_induction.default_callbacks import default_sample_callback
from sbp_induction.default_callbacks import default_step_callback
from sbp_induction.default_callbacks import SeriesSample
from sbp_induction.div_cleaning import aggregate_stats
from sbp_induction.div_cleaning import clean
from sbp_induction.div_cleaning import CleanMethod
from sbp_induction.div_cleaning import CleanStats
from sbp_induction.div_cleaning import CleanSummary
from sbp_induction.exceptions import SolverBlowUpError
from sbp_induction.fields import divergence
from sbp_induction.fields import GridSpec
from sbp_induction.fields import norm_m
from sbp_induction.induction_rhs import FormSelection
from sbp_induction.induction_rhs import HallParams
from sbp_induction.induction_rhs import make_rhs
from sbp_induction.induction_rhs import VelocitySampler
from sbp_induction.time_integration import CARPENTER_KENNEDY_4_5
from sbp_induction.time_integration import compute_dt
from sbp_induction.time_integration import lsrk_step
from sbp_induction.typing import VectorGridFn

logger = logging.getLogger(__name__)


@dataclass
class SimulationResult:
    grid: GridSpec
    case: ExperimentCase
    B: VectorGridFn
    t: float
    steps: int
    series: List[SeriesSample]
    clean_summary: CleanSummary
    blew_up: bool = False
    wall_time: float = 0.0


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    eps_B: float
    eoc_B: Optional[float]
    eps_divB: float
    eoc_divB: Optional[float]
    runtime_s: float


@dataclass
class ConvergenceReport:
    rows: List[ConvergenceRow] = field(default_factory=list)


@dataclass(frozen=True)
class CflScanResult:
    rows: List[Tuple[float, bool]]
    max_stable: Optional[float]


@dataclass(frozen=True)
class CleanStudyRow:
    forms: FormSelection
    energy: float
    eps_B: float
    eps_divB: float
    method: CleanMethod


def experimental_order(
    eps_coarse: float, eps_fine: float, n_coarse: int, n_fine: int
) -> float:
    """
    ``log(ε_coarse/ε_fine) / log(N_fine/N_coarse)``. NaN when one of the errors
    vanishes or is not finite.
    """
    if not (np.isfinite(eps_coarse) and np.isfinite(eps_fine)):
        return math.nan
    if eps_coarse <= 0 or eps_fine <= 0:
        return math.nan
    return math.log(eps_coarse / eps_fine) / math.log(n_fine / n_coarse)


def compute_errors(
    grid: GridSpec, B_num: VectorGridFn, t: float, case: ExperimentCase
) -> Tuple[float, float]:
    """
    ``ε_B = ‖B_num - B_ana(t)‖_M`` and ``ε_divB = ‖div B_num‖_M``. ``ε_B`` is NaN
    when the case has no analytical solution.
    """
    B_num = grid.check_vector(B_num)
    if not np.all(np.isfinite(B_num)):
        return math.nan, math.nan
    eps_div = norm_m(grid, divergence(grid, B_num))
    if case.exact is None:
        return math.nan, eps_div
    return norm_m(grid, B_num - grid.sample(case.exact, t)), eps_div


class ExperimentHarness(object):
    """
    Runs simulations and parameter sweeps. The callbacks used while time
    stepping can be replaced with the ``*_loader`` decorators, in the same way
    for every run made with this harness.
    """

    def __init__(self) -> None:
        self._step_callback: Callable = default_step_callback
        self._blowup_callback: Callable = default_blowup_callback
        self._sample_callback: Callable = default_sample_callback

    @staticmethod
    def init_config(config: Config) -> Config:
        """Install the default options; values already present are kept."""
        config.setdefault("TEST_CASE", "rotation3d")
        config.setdefault("ORDER", 4)
        config.setdefault("N", 40)
        config.setdefault("UIBJ_FORM", None)
        config.setdefault("SOURCE_FORM", None)
        config.setdefault("UJBI_FORM", None)
        config.setdefault("FORM_PRESET", None)
        config.setdefault("HALL", None)
        config.setdefault("OUTFLOW_U_FULL", False)
        config.setdefault("DIVCLEAN_METHOD", "none")
        config.setdefault("DIVCLEAN_TOL", 1e-3)
        config.setdefault("DIVCLEAN_MAX_ITER", 50)
        config.setdefault("CFL", 0.95)
        config.setdefault("HALL_CFL_SCALING", None)
        config.setdefault("FINAL_TIME", None)
        config.setdefault("DIVBOUND_MODE", 1)
        config.setdefault("OUTPUT_DIR", "output")
        config.setdefault("SERIES_STRIDE", 10)
        config.setdefault("LOG_LEVEL", "WARNING")
        return config

    def load_config(
        self,
        path: Optional[str] = None,
        overrides: Optional[Mapping] = None,
        use_env: bool = True,
    ) -> RunConfig:
        """
        Collect options from a JSON file, ``SBP_INDUCTION_*`` environment
        variables and explicit overrides (in increasing precedence) on top of
        the defaults.

        :param path: optional JSON file with lower case option names
        :param overrides: lower case option names mapped to values; ``None``
                          values are ignored
        :param use_env: whether environment variables are read
        """
        config = new_config()
        if path is not None:
            load_json_file(config, path)
        if use_env:
            config.from_prefixed_env(ENV_PREFIX)
        for key, value in (overrides or {}).items():
            if value is not None:
                config[key.upper()] = value
        self.init_config(config)
        run_config = RunConfig(config)
        run_config.validate()
        return run_config

    def step_loader(self, callback: Callable) -> Callable:
        """
        This decorator sets the callback function called after every accepted
        time step.

        The decorated function must take **three** arguments: the time, the
        step index and the magnetic field.
        """
        self._step_callback = callback
        return callback

    def blowup_loader(self, callback: Callable) -> Callable:
        """
        This decorator sets the callback function called when the numerical
        solution stops being finite. It receives the
        :class:`~sbp_induction.exceptions.SolverBlowUpError` and must return the
        :class:`SeriesSample` recorded for the failed step.
        """
        self._blowup_callback = callback
        return callback

    def sample_loader(self, callback: Callable) -> Callable:
        """
        This decorator sets the callback function turning ``(grid, t, B)`` into
        a row of the time series.
        """
        self._sample_callback = callback
        return callback

    def run_simulation(self, cfg: RunConfig) -> SimulationResult:
        """
        Integrate the configured case from ``t = 0`` to the final time.

        The velocity is sampled on the grid (once when it is stationary), every
        step is followed by the optional divergence cleaning, and the series
        records the first state, every ``SERIES_STRIDE``-th step and the last
        state. A blow-up ends the run early with ``blew_up`` set.
        """
        case = cfg.case
        grid = case.build_grid(cfg.order, cfg.n)
        forms = cfg.forms
        hall = HallParams(case.rho) if cfg.hall else None
        sampler = VelocitySampler(
            grid, case.velocity, stationary=case.stationary_velocity
        )
        rhs_fn = make_rhs(grid, forms, cfg.boundary_condition, hall, sampler)
        control = cfg.step_control
        cleaning = cfg.divclean
        final_time = cfg.final_time
        stride = cfg.series_stride

        logger.info("Starting run: %s", cfg.describe())
        started = time.perf_counter()
        B = grid.check_vector(grid.sample(case.initial, 0.0))
        t = 0.0
        step = 0
        series = [self._sample_callback(grid, t, B)]
        stats: List[CleanStats] = []
        blew_up = False

        while t < final_time:
            remaining = final_time - t
            dt = compute_dt(control, grid, sampler(t), remaining)
            try:
                B = lsrk_step(CARPENTER_KENNEDY_4_5, rhs_fn, t, dt, B, step=step + 1)
            except SolverBlowUpError as e:
                series.append(self._blowup_callback(e))
                blew_up = True
                break
            t = final_time if dt >= remaining else t + dt
            step += 1
            if cleaning.method is not CleanMethod.NONE:
                B, clean_stats = clean(grid, cleaning, B)
                stats.append(clean_stats)
            self._step_callback(t, step, B)
            if step % stride == 0 or t >= final_time:
                series.append(self._sample_callback(grid, t, B))

        wall_time = time.perf_counter() - started
        summary = aggregate_stats(stats)
        logger.info(
            "Finished run after %d steps at t=%g in %.2fs (cleaned %d times, "
            "%d CG iterations)%s",
            step,
            t,
            wall_time,
            summary.cleaned,
            summary.total_iterations,
            ", solution blew up" if blew_up else "",
        )
        return SimulationResult(
            grid=grid,
            case=case,
            B=B,
            t=t,
            steps=step,
            series=series,
            clean_summary=summary,
            blew_up=blew_up,
            wall_time=wall_time,
        )

    def errors(self, result: SimulationResult) -> Tuple[float, float]:
        if result.blew_up:
            return math.nan, math.nan
        return compute_errors(result.grid, result.B, result.t, result.case)

    def run_convergence(self, cfg: RunConfig, n_list: Sequence[int]) -> ConvergenceReport:
        """Run ``cfg`` for every N and attach experimental orders of convergence."""
        report = ConvergenceReport()
        previous: Optional[ConvergenceRow] = None
        for n in sorted(n_list):
            result = self.run_simulation(cfg.replace(n=n))
            eps_B, eps_div = self.errors(result)
            row = ConvergenceRow(
                n=n,
                eps_B=eps_B,
                eoc_B=None
                if previous is None
                else experimental_order(previous.eps_B, eps_B, previous.n, n),
                eps_divB=eps_div,
                eoc_divB=None
                if previous is None
                else experimental_order(previous.eps_divB, eps_div, previous.n, n),
                runtime_s=result.wall_time,
            )
            logger.info("N=%d: eps_B=%.3e eps_divB=%.3e", n, eps_B, eps_div)
            report.rows.append(row)
            previous = row
        return report

    def run_cfl_scan(self, cfg: RunConfig, cfl_list: Sequence[float]) -> CflScanResult:
        """
        Run ``cfg`` once per CFL number. With the Hall scaling active the
        scanned numbers are divided by N like the base CFL number. The
        maximal stable value is the largest scanned number below which every
        scanned number stays finite.
        """
        rows = []
        for cfl in sorted(cfl_list):
            result = self.run_simulation(cfg.replace(cfl=float(cfl)))
            rows.append((float(cfl), not result.blew_up))
            logger.info("cfl=%g: %s", cfl, "stable" if not result.blew_up else "blow-up")

        max_stable = None
        for cfl, stable in rows:
            if not stable:
                break
            max_stable = cfl
        return CflScanResult(rows, max_stable)

    def run_clean_study(
        self,
        cfg: RunConfig,
        methods: Sequence[str],
        presets: Optional[Sequence[int]] = None,
    ) -> List[CleanStudyRow]:
        """
        Final energy and errors for each combination of form selection and
        cleaning method. Without ``presets`` the configured forms are used.
        """
        selections = (
            [FormSelection.preset(p) for p in presets] if presets else [cfg.forms]
        )
        rows = []
        for forms in selections:
            for method in methods:
                run_cfg = cfg.replace(
                    uibj_form=forms.uiBj.value,
                    source_form=forms.source.value,
                    ujbi_form=forms.ujBi.value,
                    form_preset=None,
                    divclean_method=method,
                )
                result = self.run_simulation(run_cfg)
                eps_B, eps_div = self.errors(result)
                final_energy = math.nan if result.blew_up else result.series[-1].energy
                rows.append(
                    CleanStudyRow(
                        forms, final_energy, eps_B, eps_div, run_cfg.divclean.method
                    )
                )
        return rows
