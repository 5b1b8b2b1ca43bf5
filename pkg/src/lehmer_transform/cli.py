"""Command-line interface.

Exit status: 0 on success, 1 when the request has no answer for this data
(constant sample, target out of range, ...), 2 on I/O, parse or usage errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import distributions as dist
from .dataio import FORMATS, dumps_records, infer_format, read_series
from .errors import DomainError, LehmerError
from .inversion import invert, invert_series
from .normalization import IDENTITY, NormalizationPipeline, normalize
from .spectrogram import DROP_PARTIAL, WindowPlan, breve_features, breve_spectrogram
from .transform import breve_moment, lehmer, lehmer_spectrum

COMMANDS = (
    "transform", "spectrum", "invert", "cdf", "pdf", "breve-pdf",
    "log-breve-pdf", "modes", "spectrogram", "features",
)
DISTRIBUTION_COMMANDS = ("breve-pdf", "log-breve-pdf", "modes")
DEFAULT_GRID = "-30:30:241"


@dataclass
class RunConfig:
    command: str
    input_path: str
    output_path: Optional[str] = None
    format: Optional[str] = None
    input_format: Optional[str] = None
    normalize: Optional[str] = None
    s: str = "1"
    grid: str = DEFAULT_GRID
    sentinels: bool = True
    target: Optional[float] = None
    tol: float = 1e-12
    method: str = "numeric"
    s0: float = 0.0
    terms: int = 4
    alpha: Optional[float] = None
    beta: Optional[float] = None
    eps: float = 1e-9
    width: int = 256
    hop: int = 64
    pad: Optional[str] = DROP_PARTIAL
    global_normalization: bool = False
    workers: int = 1

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format is not None and self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        if self.command == "invert" and self.target is None:
            raise ValueError("invert needs --target")
        if self.command in DISTRIBUTION_COMMANDS:
            if self.alpha is None or self.beta is None:
                raise ValueError(f"{self.command} needs --alpha and --beta")
            dist.BreveParams(self.alpha, self.beta)


def parse_grid(text: str, sentinels: bool = True) -> np.ndarray:
    """``"lo:hi:n"`` (uniform, plus ``±inf`` when ``sentinels``) or ``"s1,s2,..."``."""
    if ":" in text:
        lo, hi, n = text.split(":")
        g = np.linspace(float(lo), float(hi), int(n))
        if sentinels:
            g = np.concatenate([[-math.inf], g, [math.inf]])
        return g
    return np.array([breve_moment(t) for t in text.split(",") if t.strip()])


def _finite(grid: np.ndarray) -> np.ndarray:
    return grid[np.isfinite(grid)]


def _pipeline(config: RunConfig, values) -> NormalizationPipeline:
    if config.normalize:
        return NormalizationPipeline.parse(config.normalize)
    if np.all(values > 0):
        return IDENTITY
    raise ValueError("input has non-positive values; pass --normalize to choose a pipeline")


def _rows(pairs):
    return [{"s": s, "value": v} for s, v in pairs]


def _execute(config: RunConfig):
    """Return ``(records, single)`` for the configured command."""
    series = read_series(config.input_path, config.input_format)
    pipe = _pipeline(config, series.values)
    cmd = config.command

    if cmd == "spectrogram":
        plan = WindowPlan(config.width, config.hop, config.pad)
        spec = breve_spectrogram(
            series, plan, pipe, parse_grid(config.grid, config.sentinels),
            global_normalization=config.global_normalization, workers=config.workers,
        )
        return [{"window_start": w, "s": s, "value": v} for w, s, v in spec.rows()], False
    if cmd == "features":
        feats = breve_features(series.values, pipe)
        return [{"feature": k, "value": v} for k, v in feats.items()], False

    h = normalize(series.values, pipe)
    if cmd == "transform":
        s = breve_moment(config.s)
        return [{"s": s, "value": lehmer(h, s)}], True
    if cmd == "spectrum":
        return _rows(lehmer_spectrum(h, parse_grid(config.grid, config.sentinels))), False
    if cmd == "invert":
        if config.method == "series":
            moment = invert_series(h, config.target, config.s0, config.terms)
            residual = abs(lehmer(h, moment) - config.target)
            record = {"target": config.target, "moment": moment, "residual": residual,
                      "iterations": config.terms, "method": "lagrange-series"}
        else:
            r = invert(h, config.target, config.tol)
            record = {"target": config.target, "moment": r.moment, "residual": r.residual,
                      "iterations": r.iterations, "method": r.method}
        return [record], True
    if cmd == "cdf":
        coeffs = dist.linear_cdf_coeffs(h)
        grid = parse_grid(config.grid, config.sentinels)
        return _rows((s, dist.empirical_cdf(h, coeffs, s)) for s in grid), False
    if cmd == "pdf":
        coeffs = dist.linear_cdf_coeffs(h)
        grid = _finite(parse_grid(config.grid, False))
        return _rows((s, dist.empirical_pdf(h, coeffs, s)) for s in grid), False

    p = dist.BreveParams(config.alpha, config.beta)
    grid = _finite(parse_grid(config.grid, False))
    if cmd == "breve-pdf":
        hb = dist.breve_normalize(h, p, config.eps)
        return _rows((s, dist.breve_pdf(hb, p, s)) for s in grid), False
    if cmd == "log-breve-pdf":
        hl = dist.log_breve_normalize(h, p)
        return _rows((s, dist.log_breve_pdf(hl, p, s)) for s in grid), False
    if cmd == "modes":
        hb = dist.breve_normalize(h, p, config.eps)
        return _rows((m, dist.breve_pdf(hb, p, m)) for m in dist.find_modes(hb, p, grid)), False
    raise ValueError(f"unknown command {cmd!r}")


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        config.validate()
        records, single = _execute(config)
        fmt = config.format or infer_format(config.output_path)
        text = dumps_records(records, fmt, single=single)
        if config.output_path:
            with open(config.output_path, "w") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except DomainError as err:
        print(f"error: {type(err).__name__}: {err}", file=stderr)
        return 1
    except (LehmerError, OSError, ValueError) as err:
        print(f"error: {type(err).__name__}: {err}", file=stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lehmer", description="Discrete Lehmer transform of a sample or time series."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("input_path", metavar="INPUT", help="CSV ('value' or 'time,value') or JSON file")
        p.add_argument("-o", "--output", dest="output_path", help="output file (default: stdout)")
        p.add_argument("-f", "--format", choices=FORMATS, help="output format (default: from --output suffix, else csv)")
        p.add_argument("--input-format", choices=FORMATS, help="input format (default: from suffix)")
        p.add_argument("--normalize", metavar="SPEC",
                       help="pipeline such as 'affine-unit:0.01' or 'abs-shift:1e-3,scale-to-max:1'")
        return p

    def grid_args(p, sentinels=True):
        p.add_argument("--grid", default=DEFAULT_GRID,
                       help="'lo:hi:n' or comma list of moments (default %(default)s)")
        if sentinels:
            p.add_argument("--no-sentinels", dest="sentinels", action="store_false",
                           help="do not append -inf/+inf to a lo:hi:n grid")

    def breve_args(p, eps=True):
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--beta", type=float, required=True)
        if eps:
            p.add_argument("--eps", type=float, default=1e-9, help="lower endpoint floor")

    p = common("transform", "transform at one breve moment")
    p.add_argument("--s", default="1", help="breve moment; 'inf' and '-inf' allowed")
    grid_args(common("spectrum", "transform over a grid of moments"))
    p = common("invert", "breve moment producing a target statistic")
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--method", choices=("numeric", "series"), default="numeric")
    p.add_argument("--s0", type=float, default=0.0, help="expansion point for --method series")
    p.add_argument("--terms", type=int, default=4)
    grid_args(common("cdf", "linear-family CDF over a grid"))
    grid_args(common("pdf", "linear-family density over a grid"), sentinels=False)
    p = common("breve-pdf", "Breve density over a grid")
    breve_args(p)
    grid_args(p, sentinels=False)
    p = common("log-breve-pdf", "Log-Breve density over a grid")
    breve_args(p, eps=False)
    grid_args(p, sentinels=False)
    p = common("modes", "extreme points of the Breve density within the grid")
    breve_args(p)
    grid_args(p, sentinels=False)
    p = common("spectrogram", "transform over sliding windows")
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--hop", type=int, default=64)
    p.add_argument("--keep-partial", dest="pad", action="store_const", const=None, default=DROP_PARTIAL,
                   help="keep a shorter trailing window")
    p.add_argument("--global-normalization", action="store_true",
                   help="normalize the whole series once instead of per window")
    p.add_argument("--workers", type=int, default=1)
    grid_args(p)
    common("features", "transform at the landmark moments")
    return parser


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    fields = RunConfig.__dataclass_fields__
    config = RunConfig(**{k: v for k, v in args.items() if k in fields})
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
