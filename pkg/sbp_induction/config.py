import json
from functools import cached_property
from pathlib import Path
from typing import Any
from typing import Dict

from flask import Config

from sbp_induction.analytic_solutions import CaseKind
from sbp_induction.analytic_solutions import ExperimentCase
from sbp_induction.analytic_solutions import make_case
from sbp_induction.div_cleaning import CleanMethod
from sbp_induction.div_cleaning import DivCleanConfig
from sbp_induction.exceptions import ConfigurationError
from sbp_induction.exceptions import SbpInductionException
from sbp_induction.induction_rhs import BoundaryCondition
from sbp_induction.induction_rhs import BoundaryKind
from sbp_induction.induction_rhs import FormSelection
from sbp_induction.sbp_ops import minimum_nodes
from sbp_induction.sbp_ops import SUPPORTED_ORDERS
from sbp_induction.time_integration import StepControl

ENV_PREFIX = "SBP_INDUCTION"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def new_config(root_path: str = ".") -> Config:
    """An empty ``flask.Config`` without any application attached."""
    return Config(root_path)


def load_json_file(config: Config, path: str) -> None:
    """
    Load a JSON object whose keys are the lower case option names, e.g.
    ``{"test_case": "confined", "order": 2}``.
    """

    def load(fh: Any) -> Dict[str, Any]:
        data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path} must contain a JSON object")
        return {str(key).upper(): value for key, value in data.items()}

    try:
        config.from_file(str(Path(path).resolve()), load=load)
    except OSError as e:
        raise ConfigurationError(f"Unable to read configuration file {path}: {e}") from e
    except ValueError as e:
        raise ConfigurationError(f"Invalid JSON in {path}: {e}") from e


class RunConfig(object):
    """
    Read-only view of the options of one run. All values live in a
    ``flask.Config``; the getters here validate them and turn them into the
    objects the numerics work with. Defaults are installed by
    :meth:`ExperimentHarness.init_config`.
    """

    def __init__(self, config: Config) -> None:
        self._config = config

    @property
    def raw(self) -> Config:
        return self._config

    def _get(self, key: str) -> Any:
        try:
            return self._config[key]
        except KeyError:
            raise ConfigurationError(f"Configuration option {key} is not set") from None

    def replace(self, **overrides: Any) -> "RunConfig":
        """Copy of this configuration with lower case option names overridden."""
        config = new_config(self._config.root_path)
        config.update(self._config)
        config.update({key.upper(): value for key, value in overrides.items()})
        return RunConfig(config)

    @property
    def test_case(self) -> CaseKind:
        value = self._get("TEST_CASE")
        try:
            return CaseKind(value)
        except ValueError:
            choices = ", ".join(kind.value for kind in CaseKind)
            raise ConfigurationError(
                f"TEST_CASE must be one of {choices}, got {value!r}"
            ) from None

    @property
    def divbound_mode(self) -> int:
        mode = self._get("DIVBOUND_MODE")
        if isinstance(mode, bool) or not isinstance(mode, int) or mode < 1:
            raise ConfigurationError(
                f"DIVBOUND_MODE must be a positive integer, got {mode!r}"
            )
        return mode

    @cached_property
    def case(self) -> ExperimentCase:
        return make_case(self.test_case.value, divbound_mode=self.divbound_mode)

    @property
    def order(self) -> int:
        order = self._get("ORDER")
        if order not in SUPPORTED_ORDERS:
            raise ConfigurationError(
                f"ORDER must be one of {', '.join(map(str, SUPPORTED_ORDERS))}, "
                f"got {order!r}"
            )
        return int(order)

    @property
    def n(self) -> int:
        n = self._get("N")
        if isinstance(n, bool) or not isinstance(n, int):
            raise ConfigurationError(f"N must be an integer, got {n!r}")
        # Enough nodes for the boundary closures of the chosen order.
        minimum = minimum_nodes(self.order)
        if n < minimum:
            raise ConfigurationError(
                f"N must be at least {minimum} for order {self.order}, got {n}"
            )
        return n

    @property
    def forms(self) -> FormSelection:
        preset = self._get("FORM_PRESET")
        if preset is not None:
            try:
                return FormSelection.preset(int(preset))
            except (TypeError, ValueError, SbpInductionException):
                raise ConfigurationError(f"Invalid FORM_PRESET {preset!r}") from None
        names = [self._get(key) for key in ("UIBJ_FORM", "SOURCE_FORM", "UJBI_FORM")]
        defaults = self.case.default_forms
        if all(name is None for name in names):
            return defaults
        fallback = (defaults.uiBj, defaults.source, defaults.ujBi)
        merged = [
            default if name is None else name for name, default in zip(names, fallback)
        ]
        try:
            return FormSelection(*merged)
        except SbpInductionException as e:
            raise ConfigurationError(str(e)) from e

    @property
    def hall(self) -> bool:
        hall = self._get("HALL")
        case = self.case
        if hall is None:
            return case.hall
        if not isinstance(hall, bool):
            raise ConfigurationError(f"HALL must be a boolean or null, got {hall!r}")
        if not hall and case.boundary is BoundaryKind.HALL_OUTFLOW:
            raise ConfigurationError("The hall-outflow case requires the Hall term")
        return hall

    @property
    def outflow_u_full(self) -> bool:
        return bool(self._get("OUTFLOW_U_FULL"))

    @property
    def boundary_condition(self) -> BoundaryCondition:
        return self.case.boundary_condition(self.outflow_u_full)

    @property
    def divclean(self) -> DivCleanConfig:
        try:
            cfg = DivCleanConfig(
                CleanMethod(self._get("DIVCLEAN_METHOD")),
                float(self._get("DIVCLEAN_TOL")),
                int(self._get("DIVCLEAN_MAX_ITER")),
            )
        except ValueError:
            choices = ", ".join(m.value for m in CleanMethod)
            raise ConfigurationError(
                f"DIVCLEAN_METHOD must be one of {choices}, "
                f"got {self._get('DIVCLEAN_METHOD')!r}"
            ) from None
        if cfg.method.dirichlet and self.case.periodic:
            raise ConfigurationError(
                f"Cleaning method {cfg.method.value} needs a non-periodic test case"
            )
        return cfg

    @property
    def cfl(self) -> float:
        cfl = self._get("CFL")
        if not isinstance(cfl, (int, float)) or not cfl > 0:
            raise ConfigurationError(f"CFL must be a positive number, got {cfl!r}")
        return float(cfl)

    @property
    def hall_cfl_scaling(self) -> bool:
        scaling = self._get("HALL_CFL_SCALING")
        return self.hall if scaling is None else bool(scaling)

    @property
    def step_control(self) -> StepControl:
        return StepControl(self.cfl, self.hall_cfl_scaling)

    @property
    def final_time(self) -> float:
        final_time = self._get("FINAL_TIME")
        if final_time is None:
            return self.case.final_time
        if not isinstance(final_time, (int, float)) or final_time < 0:
            raise ConfigurationError(
                f"FINAL_TIME must be a non-negative number, got {final_time!r}"
            )
        return float(final_time)

    @property
    def output_dir(self) -> Path:
        return Path(self._get("OUTPUT_DIR"))

    @property
    def series_stride(self) -> int:
        stride = self._get("SERIES_STRIDE")
        if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
            raise ConfigurationError(f"SERIES_STRIDE must be at least 1, got {stride!r}")
        return stride

    @property
    def log_level(self) -> str:
        level = self._get("LOG_LEVEL")
        if not isinstance(level, str) or level.upper() not in LOG_LEVELS:
            raise ConfigurationError(
                f"LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {level!r}"
            )
        return level.upper()

    def validate(self) -> None:
        """Read every option once so that inconsistencies surface early."""
        for name in (
            "forms",
            "hall",
            "n",
            "boundary_condition",
            "divclean",
            "step_control",
            "final_time",
            "series_stride",
            "log_level",
        ):
            getattr(self, name)

    def describe(self) -> str:
        return (
            f"{self.test_case.value} order={self.order} N={self.n} "
            f"forms={self.forms.label} hall={self.hall} "
            f"clean={self.divclean.method.value}"
        )
