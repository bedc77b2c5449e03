"""
Result files: CSV tables with fixed headers and two-column data files that
gnuplot reads directly.
"""
import csv
import logging
from pathlib import Path
from typing import Iterable
from typing import List
from typing import Sequence
from typing import Union

from sbp_induction.default_callbacks import SeriesSample
from sbp_induction.exceptions import OutputError
from sbp_induction.fields import dump_binary
from sbp_induction.fields import dump_csv
from sbp_induction.harness import CflScanResult
from sbp_induction.harness import CleanStudyRow
from sbp_induction.harness import ConvergenceReport
from sbp_induction.harness import SimulationResult

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SERIES_HEADER = ("t", "energy", "div_norm")
ERRORS_HEADER = ("N", "eps_B", "eps_divB")
CONVERGENCE_HEADER = ("N", "eps_B", "eoc_B", "eps_divB", "eoc_divB", "runtime_s")
CFL_SCAN_HEADER = ("cfl", "stable")
CLEAN_STUDY_HEADER = ("uiBj", "source", "ujBi", "energy", "eps_B", "eps_divB", "method")


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(value) for value in row])
    except OSError as e:
        raise OutputError(f"Unable to write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def write_gnuplot(
    path: PathLike, series: Sequence[SeriesSample], column: str
) -> Path:
    """Two whitespace separated columns ``t <column>`` with a comment header."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(f"# t {column}\n")
            for sample in series:
                fh.write(f"{sample.t!r} {getattr(sample, column)!r}\n")
    except OSError as e:
        raise OutputError(f"Unable to write {path}: {e}") from e
    logger.info("Wrote %s", path)
    return path


def write_series(path: PathLike, series: Sequence[SeriesSample]) -> Path:
    return write_csv(path, SERIES_HEADER, series)


def write_errors(path: PathLike, n: int, eps_B: float, eps_divB: float) -> Path:
    return write_csv(path, ERRORS_HEADER, [(n, eps_B, eps_divB)])


def write_convergence(path: PathLike, report: ConvergenceReport) -> Path:
    rows = (
        (r.n, r.eps_B, r.eoc_B, r.eps_divB, r.eoc_divB, r.runtime_s) for r in report.rows
    )
    return write_csv(path, CONVERGENCE_HEADER, rows)


def write_cfl_scan(path: PathLike, scan: CflScanResult) -> Path:
    return write_csv(path, CFL_SCAN_HEADER, scan.rows)


def write_clean_study(path: PathLike, rows: Sequence[CleanStudyRow]) -> Path:
    return write_csv(
        path,
        CLEAN_STUDY_HEADER,
        (
            (
                r.forms.uiBj.value,
                r.forms.source.value,
                r.forms.ujBi.value,
                r.energy,
                r.eps_B,
                r.eps_divB,
                r.method.value,
            )
            for r in rows
        ),
    )


def emit_outputs(
    result: SimulationResult,
    eps_B: float,
    eps_divB: float,
    output_dir: PathLike,
    snapshot: bool = False,
) -> List[Path]:
    """
    Write the files of a single run: the time series as CSV and as gnuplot
    data (energy and divergence separately), the error table and, on request,
    binary and CSV dumps of the final field.
    """
    out = Path(output_dir)
    written = [
        write_series(out / "series.csv", result.series),
        write_gnuplot(out / "series_energy.dat", result.series, "energy"),
        write_gnuplot(out / "series_div.dat", result.series, "div_norm"),
        write_errors(out / "errors.csv", max(result.grid.shape), eps_B, eps_divB),
    ]
    if snapshot and not result.blew_up:
        dump_binary(out / "final_field.bin", result.B)
        dump_csv(out / "final_field.csv", result.grid, result.B)
        written += [out / "final_field.bin", out / "final_field.csv"]
    return written
