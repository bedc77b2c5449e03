from .analytic_solutions import CaseKind as CaseKind
from .analytic_solutions import ExperimentCase as ExperimentCase
from .analytic_solutions import HallWaveParams as HallWaveParams
from .analytic_solutions import make_case as make_case
from .config import RunConfig as RunConfig
from .div_cleaning import cg_solve as cg_solve
from .div_cleaning import clean as clean
from .div_cleaning import CleanMethod as CleanMethod
from .div_cleaning import DivCleanConfig as DivCleanConfig
from .fields import curl as curl
from .fields import divergence as divergence
from .fields import energy as energy
from .fields import gradient as gradient
from .fields import GridSpec as GridSpec
from .fields import inner_m as inner_m
from .fields import norm_m as norm_m
from .harness import compute_errors as compute_errors
from .harness import ExperimentHarness as ExperimentHarness
from .induction_rhs import BoundaryCondition as BoundaryCondition
from .induction_rhs import BoundaryKind as BoundaryKind
from .induction_rhs import FORM_PRESETS as FORM_PRESETS
from .induction_rhs import FormSelection as FormSelection
from .induction_rhs import HallParams as HallParams
from .induction_rhs import rhs as rhs
from .sbp_ops import build_periodic as build_periodic
from .sbp_ops import build_sbp as build_sbp
from .sbp_ops import SbpOp1D as SbpOp1D
from .time_integration import compute_dt as compute_dt
from .time_integration import lsrk_step as lsrk_step
from .time_integration import StepControl as StepControl

__version__ = "1.0.0"
