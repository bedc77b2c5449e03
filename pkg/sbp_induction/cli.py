import functools
import logging
from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional

import click
import numpy as np

from sbp_induction.config import LOG_LEVELS
from sbp_induction.config import RunConfig
from sbp_induction.exceptions import SbpInductionException
from sbp_induction.harness import ExperimentHarness
from sbp_induction.induction_rhs import FormSelection
from sbp_induction.outputs import emit_outputs
from sbp_induction.outputs import write_cfl_scan
from sbp_induction.outputs import write_clean_study
from sbp_induction.outputs import write_convergence
from sbp_induction.sbp_ops import apply_d
from sbp_induction.sbp_ops import build_sbp
from sbp_induction.sbp_ops import sbp_residual
from sbp_induction.sbp_ops import SUPPORTED_ORDERS

logger = logging.getLogger(__name__)


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got {text!r}")


def _single_int(text: Optional[str]) -> Optional[int]:
    if text is None:
        return None
    values = _int_list(text)
    if len(values) != 1:
        raise click.BadParameter(f"expected a single node count, got {text!r}")
    return values[0]


def _str_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _reports_errors(f: Callable) -> Callable:
    @functools.wraps(f)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return f(*args, **kwargs)
        except SbpInductionException as e:
            raise click.ClickException(str(e)) from e

    return wrapper


def run_options(f: Callable) -> Callable:
    """Options shared by every command that runs simulations."""
    options = [
        click.option(
            "--config", "config_path", type=click.Path(exists=True, dir_okay=False)
        ),
        click.option("--test-case", help="rotation3d, confined, hall-periodic, ..."),
        click.option("--order", type=click.Choice([str(o) for o in SUPPORTED_ORDERS])),
        click.option("--n", "n", help="nodes per axis, a list for converge"),
        click.option("--forms", help="e.g. split,central,split"),
        click.option("--preset", type=int, help="form preset 1 to 6"),
        click.option("--clean", "clean_method", help="none, ws-ln, ws-d0 or ns-d0"),
        click.option("--cfl", type=float),
        click.option("--final-time", type=float),
        click.option("--outflow-u-full", is_flag=True),
        click.option("--output", "output_dir", type=click.Path(file_okay=False)),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _load(ctx: click.Context, options: Dict[str, Any]) -> RunConfig:
    overrides: Dict[str, Any] = {
        "test_case": options.get("test_case"),
        "order": None if options.get("order") is None else int(options["order"]),
        "n": _single_int(options.get("n")),
        "form_preset": options.get("preset"),
        "divclean_method": options.get("clean_method"),
        "cfl": options.get("cfl"),
        "final_time": options.get("final_time"),
        "outflow_u_full": True if options.get("outflow_u_full") else None,
        "output_dir": options.get("output_dir"),
    }
    if options.get("forms"):
        forms = FormSelection.parse(options["forms"])
        overrides.update(
            uibj_form=forms.uiBj.value,
            source_form=forms.source.value,
            ujbi_form=forms.ujBi.value,
        )
    harness: ExperimentHarness = ctx.obj["harness"]
    cfg = harness.load_config(options.get("config_path"), overrides)
    if ctx.obj["log_level"] is None:
        logging.getLogger("sbp_induction").setLevel(cfg.log_level)
    return cfg


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="defaults to the LOG_LEVEL option",
)
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str]) -> None:
    """Summation-by-parts solver for the magnetic induction equation."""
    logging.basicConfig(
        level=(log_level or "WARNING").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj.setdefault("harness", ExperimentHarness())
    ctx.obj["log_level"] = log_level


@cli.command("sbp-check")
@click.option(
    "--order", type=click.Choice([str(o) for o in SUPPORTED_ORDERS]), default="4"
)
@click.option("--n", "n", type=int, default=32)
@_reports_errors
def sbp_check(order: str, n: int) -> None:
    """Print the residuals of the SBP property of a 1D operator."""
    op = build_sbp(int(order), n, 1.0 / (n - 1))
    row_sums = float(np.max(np.abs(apply_d(op, np.ones(n))))) * op.dx
    click.echo(f"order={op.order} n={op.n}")
    click.echo(f"max|MD + D^T M - E| = {sbp_residual(op):.3e}")
    click.echo(f"max|row sum of D| * dx = {row_sums:.3e}")
    click.echo(f"second derivative: {'yes' if op.has_d2 else 'no'}")


@cli.command("run")
@run_options
@click.option("--snapshot", is_flag=True, help="also dump the final field")
@click.pass_context
@_reports_errors
def run(ctx: click.Context, snapshot: bool, **options: Any) -> None:
    """Run one simulation and write its time series and errors."""
    cfg = _load(ctx, options)
    harness: ExperimentHarness = ctx.obj["harness"]
    result = harness.run_simulation(cfg)
    eps_B, eps_div = harness.errors(result)
    emit_outputs(result, eps_B, eps_div, cfg.output_dir, snapshot=snapshot)
    status = "blew up" if result.blew_up else "finished"
    click.echo(
        f"{cfg.describe()}: {status} at t={result.t:.6g} after {result.steps} steps, "
        f"eps_B={eps_B:.3e} eps_divB={eps_div:.3e}"
    )


@cli.command("converge")
@run_options
@click.pass_context
@_reports_errors
def converge(ctx: click.Context, **options: Any) -> None:
    """Convergence study over the node counts given with ``--n 40,80,160``."""
    n_list = options.pop("n") or "40,80,160"
    cfg = _load(ctx, options)
    harness: ExperimentHarness = ctx.obj["harness"]
    report = harness.run_convergence(cfg, _int_list(n_list))
    write_convergence(cfg.output_dir / "convergence.csv", report)
    for row in report.rows:
        eoc = "" if row.eoc_B is None else f" EOC={row.eoc_B:.2f}"
        click.echo(f"N={row.n} eps_B={row.eps_B:.3e}{eoc} eps_divB={row.eps_divB:.3e}")


@cli.command("cfl-scan")
@run_options
@click.option("--cfl-grid", default="0.1,0.5,0.9,1.3,1.7,1.9,2.0")
@click.pass_context
@_reports_errors
def cfl_scan(ctx: click.Context, cfl_grid: str, **options: Any) -> None:
    """
    Find the largest CFL number without blow-up. Every run goes to the final
    time of the case unless --final-time is given.
    """
    cfg = _load(ctx, options)
    harness: ExperimentHarness = ctx.obj["harness"]
    scan = harness.run_cfl_scan(cfg, _float_list(cfl_grid))
    write_cfl_scan(cfg.output_dir / "cfl_scan.csv", scan)
    scaling = f"/{cfg.n}" if cfg.hall_cfl_scaling else ""
    if scan.max_stable is None:
        click.echo("no scanned CFL number is stable")
    else:
        click.echo(f"max stable cfl = {scan.max_stable:g}{scaling}")


@cli.command("clean-study")
@run_options
@click.option("--methods", default="none,ws-ln,ws-d0,ns-d0")
@click.option("--presets", default=None, help="form presets, e.g. 1,2,3,4,5,6")
@click.pass_context
@_reports_errors
def clean_study(
    ctx: click.Context, methods: str, presets: Optional[str], **options: Any
) -> None:
    """Compare divergence cleaning methods for one or more form selections."""
    cfg = _load(ctx, options)
    harness: ExperimentHarness = ctx.obj["harness"]
    rows = harness.run_clean_study(
        cfg, _str_list(methods), _int_list(presets) if presets else None
    )
    write_clean_study(cfg.output_dir / "clean_study.csv", rows)
    for row in rows:
        click.echo(
            f"{row.forms.label} {row.method.value}: energy={row.energy:.3e} "
            f"eps_B={row.eps_B:.3e} eps_divB={row.eps_divB:.3e}"
        )