"""Command-line front end producing plot-ready CSV/JSON tables.

Commands::

    spectrum  eigenvalues per sector with bound-state flags
    probs     joint probabilities of the bound states of one sector
    bands     continuum band intervals (and sampled G for plotting)
    gcrit     critical coupling versus quasi-momentum angle
    check     oracle and operator-identity self checks

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 no bound state.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle
from .errors import JCHError, NoBoundState, NumericsError, ParameterError
from .model import ModelParams, check_sector
from .realspace import joint_probabilities, to_real_space
from .secular import (
    DEFAULT_RESOLUTION,
    SecularFunction,
    band_intervals,
    classify_eigenvalues,
    critical_coupling_branches,
    find_bound_eigenvalues,
)
from .sector import (
    TOL_REALITY,
    SweepError,
    assemble_sector_matrix,
    default_workers,
    sector_sweep,
    solve_sector,
    solve_sector_matrix,
)

log = logging.getLogger("jchbound")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICS, EXIT_NO_BOUND = 0, 1, 2, 3

COLUMNS = {
    "spectrum": ("P", "eigen_index", "lambda", "is_bound", "gap_margin"),
    "probs": ("d", "p_ff", "p_fa", "p_aa", "branch"),
    "bands": ("band_index", "lo", "hi"),
    "gsamples": ("lambda", "G"),
    "gcrit": ("P_angle", "g_c_upper_branch", "g_c_lower_branch", "g_c_max"),
    "check": ("test_name", "max_residual", "pass"),
}

COMMANDS = ("spectrum", "probs", "bands", "gcrit", "check")
CHECK_THRESHOLDS = {"oracle": 1e-9, "identity": 1e-12, "symmetry": 1e-10}


@dataclass
class RunConfig:
    command: str
    n: int = 50
    delta: float = 0.0
    j: float = 1.0
    g_over_j: list = field(default_factory=lambda: [1.0])
    sectors: str = "all"
    p_angle_grid: int = 64
    out: str | None = None
    format: str = "csv"
    tol_reality: float = TOL_REALITY
    tol_root: float = 1e-12
    allow_zero_j: bool = False
    check_n_list: list = field(default_factory=lambda: [4, 6, 8])
    resolution: int = DEFAULT_RESOLUTION
    inject_fault: bool = False

    def params(self, g_over_j: float) -> ModelParams:
        return ModelParams(self.n, self.delta, self.j, g_over_j * self.j, self.allow_zero_j)

    def sector_list(self) -> list:
        text = str(self.sectors).strip().lower()
        if text == "all":
            return list(range(self.n))
        if text == "odd":
            return list(range(1, self.n, 2))
        if text == "even":
            return list(range(0, self.n, 2))
        try:
            values = [int(tok) for tok in text.split(",") if tok.strip()]
        except ValueError:
            raise ParameterError(f"--sectors must be an integer list, 'odd', 'even' or 'all'; got {self.sectors!r}")
        if not values:
            raise ParameterError("--sectors is empty")
        return [check_sector(self.n, v) for v in values]


# --- formatting -----------------------------------------------------------

def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if value == 0:
            return "0"
        return f"{value:.12g}"
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else float(f"{value:.12g}")
    return value


def render(rows, columns, fmt_name: str) -> str:
    if fmt_name == "json":
        data = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _suffixed(path: str, tag: str) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}_{tag}{p.suffix}")


def emit(text: str, path: str | Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


# --- commands -------------------------------------------------------------

def spectrum_rows(config: RunConfig, g_over_j: float) -> list:
    params = config.params(g_over_j)
    sectors = config.sector_list()
    solutions = sector_sweep([params], sectors, tol_reality=config.tol_reality)

    def classify(sol):
        bands = band_intervals(params, sol.sector, config.resolution)
        margins = classify_eigenvalues(sol.physical_eigenvalues, bands)
        roots = [r.lambda_b for r in find_bound_eigenvalues(params, sol.sector, bands, rtol=config.tol_root)]
        for lam in sol.physical_eigenvalues[margins > 0]:
            if not roots or min(abs(lam - r) for r in roots) > 1e-8 * max(1.0, abs(lam)):
                log.warning("sector %d: bound eigenvalue %s has no matching root of G", sol.sector, fmt(lam))
        return margins

    with ThreadPoolExecutor(max_workers=default_workers()) as pool:
        margins = list(pool.map(classify, solutions))
    rows = []
    for sol, margin in zip(solutions, margins):
        for i, (lam, m) in enumerate(zip(sol.physical_eigenvalues, margin)):
            rows.append((sol.sector, i, float(lam), bool(m > 0), float(m)))
    return rows


def cmd_spectrum(config: RunConfig) -> int:
    gs = config.g_over_j
    if len(gs) > 1 and config.out is None:
        raise ParameterError("several --g-over-j values need --out (one file per coupling)")
    for g in gs:
        rows = spectrum_rows(config, g)
        path = config.out if len(gs) == 1 else _suffixed(config.out, f"g{fmt(g)}")
        emit(render(rows, COLUMNS["spectrum"], config.format), path)
    return EXIT_OK


def bound_state_probabilities(params: ModelParams, p: int, resolution: int = DEFAULT_RESOLUTION):
    """``(branch, eigenvalue, JointProbabilities)`` for each bound state of sector ``p``."""
    sol = solve_sector(params, p)
    bands = band_intervals(params, p, resolution)
    margins = classify_eigenvalues(sol.eigenvalues, bands)
    margins[sol.spurious_flags] = 0.0
    out = []
    mid = 0.5 * sum(bands.hull)
    for i in np.flatnonzero(margins > 0):
        state = to_real_space(sol.vectors[:, i], params, p)
        branch = "upper" if sol.eigenvalues[i] > mid else "lower"
        out.append((branch, float(sol.eigenvalues[i]), joint_probabilities(state)))
    if not out:
        raise NoBoundState(f"no bound state in sector {p} at g/J = {params.g_over_j:g}")
    return out


def probs_rows(config: RunConfig) -> list:
    sectors = config.sector_list()
    if len(sectors) != 1 or len(config.g_over_j) != 1:
        raise ParameterError("probs needs exactly one sector and one --g-over-j value")
    params = config.params(config.g_over_j[0])
    n = params.n_cavities
    rows = []
    for branch, _, probs in bound_state_probabilities(params, sectors[0], config.resolution):
        seps, ff, fa, aa = probs.symmetric()
        # one row per separation class mod N; for even N, -N/2 repeats N/2
        keep = seps > -(n // 2) if n % 2 == 0 else np.ones(len(seps), bool)
        for d, a, b, c in zip(seps[keep], ff[keep], fa[keep], aa[keep]):
            rows.append((int(d), float(a), float(b), float(c), branch))
    return rows


def cmd_probs(config: RunConfig) -> int:
    emit(render(probs_rows(config), COLUMNS["probs"], config.format), config.out)
    return EXIT_OK


def bands_rows(config: RunConfig, samples: int = 2001):
    sectors = config.sector_list()
    if len(sectors) != 1 or len(config.g_over_j) != 1:
        raise ParameterError("bands needs exactly one sector and one --g-over-j value")
    params = config.params(config.g_over_j[0])
    p = sectors[0]
    bands = band_intervals(params, p, config.resolution)
    rows = [(i, lo, hi) for i, (lo, hi) in enumerate(bands.intervals)]

    lo, hi = bands.hull
    pad = 0.1 * max(hi - lo, 1.0)
    grid = np.linspace(lo - pad, hi + pad, samples)
    sf = SecularFunction(params, p)
    grid = grid[sf.pole_distance(grid) > 1e-9 * np.maximum(1.0, np.abs(grid))]
    g_rows = [(float(x), float(v)) for x, v in zip(grid, np.atleast_1d(sf(grid, check=False)))]
    return rows, g_rows, bands


def cmd_bands(config: RunConfig) -> int:
    rows, g_rows, _ = bands_rows(config)
    emit(render(rows, COLUMNS["bands"], config.format), config.out)
    if config.out is not None:
        emit(render(g_rows, COLUMNS["gsamples"], config.format), _suffixed(config.out, "gsamples"))
    return EXIT_OK


def gcrit_rows(config: RunConfig):
    count = config.p_angle_grid
    if count < 1:
        raise ParameterError("--p-angle-grid must be positive")
    if config.j <= 0:
        raise ParameterError("gcrit needs J > 0")
    angles = [2.0 * math.pi * i / count for i in range(count)]
    detuning = config.delta / config.j

    def run(angle):
        try:
            cc = critical_coupling_branches(angle, detuning, config.resolution)
            return (angle, cc.upper, cc.lower, cc.value), None
        except NumericsError as exc:
            return (angle, math.nan, math.nan, math.nan), exc

    with ThreadPoolExecutor(max_workers=default_workers()) as pool:
        results = list(pool.map(run, angles))
    failures = [(row[0], exc) for row, exc in results if exc is not None]
    return [row for row, _ in results], failures


def cmd_gcrit(config: RunConfig) -> int:
    rows, failures = gcrit_rows(config)
    for angle, exc in failures:
        log.warning("gcrit failed at P_angle=%s: %s", fmt(angle), exc)
    emit(render(rows, COLUMNS["gcrit"], config.format), config.out)
    return EXIT_NUMERICS if failures else EXIT_OK


ORACLE_GRID = [(d, g) for d in (0.0, 0.5, -0.5) for g in (0.5, 2.0, 5.0)]


def _oracle_deviation(params: ModelParams, inject_fault: bool) -> float:
    spectrum = oracle.sector_project_spectrum(params)
    worst = 0.0
    for p in range(params.n_cavities):
        matrix = assemble_sector_matrix(params, p)
        if inject_fault:
            # flip the sign of one inter-pair coupling
            gam = [i for i, (_, _, c) in enumerate(matrix.layout) if c == "gamma"]
            matrix.entries[1, gam[-1]] *= -1.0
        try:
            sol = solve_sector_matrix(matrix)
        except NumericsError:
            return math.inf
        ours = np.sort(sol.physical_eigenvalues)
        ref = spectrum.by_sector[p]
        if ours.shape != ref.shape:
            return math.inf
        worst = max(worst, float(np.max(np.abs(ours - ref))) if ref.size else 0.0)
    return worst


def check_rows(config: RunConfig) -> list:
    rows = []
    for n in config.check_n_list:
        for delta, g in ORACLE_GRID:
            params = ModelParams(n, delta, 1.0, g)
            dev = _oracle_deviation(params, config.inject_fault)
            name = f"oracle_N{n}_delta{fmt(delta)}_g{fmt(g)}"
            rows.append((name, dev, dev < CHECK_THRESHOLDS["oracle"]))
        params = ModelParams(n, 0.0, 1.0, 2.0)
        worst = 0.0
        for p in range(n):
            a = solve_sector(params, p).physical_eigenvalues
            b = solve_sector(params, (n - p) % n).physical_eigenvalues
            worst = max(worst, float(np.max(np.abs(np.sort(a) - np.sort(b)))))
        rows.append((f"symmetry_P_vs_N-P_N{n}", worst, worst < CHECK_THRESHOLDS["symmetry"]))
        if n <= 8:
            for ident, res in oracle.verify_operator_identities(n).items():
                rows.append((f"identity_{ident}_N{n}", res, res < CHECK_THRESHOLDS["identity"]))
    return rows


def cmd_check(config: RunConfig) -> int:
    rows = check_rows(config)
    emit(render(rows, COLUMNS["check"], config.format), config.out)
    return EXIT_OK if all(r[2] for r in rows) else EXIT_NUMERICS


DISPATCH = {
    "spectrum": cmd_spectrum,
    "probs": cmd_probs,
    "bands": cmd_bands,
    "gcrit": cmd_gcrit,
    "check": cmd_check,
}


# --- argument handling ----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jchbound", description="Two-polariton spectra of the JCH chain.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat 'key = value' file; command-line flags take precedence")
    parser.add_argument("--n", type=int)
    parser.add_argument("--delta", type=float)
    parser.add_argument("--j", type=float)
    parser.add_argument("--g-over-j", type=float, action="append")
    parser.add_argument("--sectors", help="integer, comma list, 'odd', 'even' or 'all'")
    parser.add_argument("--p-angle-grid", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--tol-reality", type=float)
    parser.add_argument("--tol-root", type=float)
    parser.add_argument("--resolution", type=int)
    parser.add_argument("--allow-zero-j", action="store_true", default=None)
    parser.add_argument("--check-n-list", "--n-list", dest="check_n_list")
    parser.add_argument("--inject-fault", action="store_true", default=None, help=argparse.SUPPRESS)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _int_list(text) -> list:
    if isinstance(text, list):
        return [int(x) for x in text]
    return [int(tok) for tok in str(text).replace(" ", "").split(",") if tok]


def _float_list(text) -> list:
    if isinstance(text, list):
        return [float(x) for x in text]
    return [float(tok) for tok in str(text).replace(" ", "").split(",") if tok]


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"not a boolean: {text!r}")


CONVERTERS = {
    "n": int,
    "delta": float,
    "j": float,
    "g_over_j": _float_list,
    "sectors": str,
    "p_angle_grid": int,
    "out": str,
    "format": str,
    "tol_reality": float,
    "tol_root": float,
    "resolution": int,
    "allow_zero_j": _bool,
    "check_n_list": _int_list,
    "inject_fault": _bool,
}


def read_config_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in CONVERTERS:
            raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def make_config(args: argparse.Namespace) -> RunConfig:
    merged = read_config_file(args.config) if args.config else {}
    for key in CONVERTERS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    kwargs = {}
    for key, value in merged.items():
        try:
            kwargs[key] = CONVERTERS[key](value)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"bad value for {key}: {value!r}") from exc
    config = RunConfig(command=args.command, **kwargs)
    if config.format not in ("csv", "json"):
        raise ParameterError(f"unknown format {config.format!r}")
    if config.command != "gcrit":
        config.params(config.g_over_j[0])
    return config


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = make_config(args)
        return DISPATCH[config.command](config)
    except NoBoundState as exc:
        log.error("%s", exc)
        return EXIT_NO_BOUND
    except ParameterError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except SweepError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG if isinstance(exc.cause, ParameterError) else EXIT_NUMERICS
    except (NumericsError, JCHError) as exc:
        log.error("%s", exc)
        return EXIT_NUMERICS
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
