"""Command-line interface.

Subcommands reproduce the standard experiments and expose the
estimation pipeline on user data:

* ``estimate``: Christoffel / leverage / density / label table for a
  measure and a set of query points, over one or more lambda values.
* ``fig2``: density-recovery and rate experiments on the sinusoidal
  test density (left and right panel data).
* ``overfit``: small-n, small-lambda demonstration of the collapse of
  the empirical Christoffel function onto the point weights.
* ``gaussian-compare``: piecewise-constant density profiled with both
  a Matern and a Gaussian kernel, plus tail-mass diagnostics.
* ``spectral``: D(lambda), its asymptote and the envelope scales over
  a lambda sweep.

Every command writes CSV files plus a ``run.json`` sidecar recording
the full configuration, seed, jitter and tolerances.  Writes are
atomic (write-then-rename), outputs are deterministic for a fixed
seed, and numbers carry 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .backends import active_backend
from .densities import get_density
from .density import (
    DEFAULT_MARGIN,
    DEFAULT_P_MIN,
    INSIDE,
    estimate_density,
    rate_diagnostic,
    support_indicator,
)
from .gram import (
    GramSystem,
    assemble,
    christoffel_at_points,
    christoffel_at_support_all,
    refit_lambda,
)
from .kernels import KernelSpec, gaussian, gram_matrix, matern
from .measure import WeightedSample, grid_1d, grid_2d, load_csv, riemann_from_density
from .spectral import (
    SpectralProfile,
    compute_D,
    default_epsilon,
    predict_asymptotic,
    predict_inside,
    predict_outside,
    tail_mass_ratio,
)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


@dataclass
class RunConfig:
    command: str
    kernel: str = "matern"
    nu: Optional[float] = 0.5
    length: float = 1.0
    lambdas: List[float] = field(default_factory=lambda: [1e-4])
    measure: str = ""
    queries: str = "at-support"
    margin: float = DEFAULT_MARGIN
    p_min: float = DEFAULT_P_MIN
    out: str = "."
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)


class _OutputTracker:
    """Atomic CSV/JSON writes with cleanup of partial output on failure."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: List[Path] = []

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
        path = self.out_dir / name
        fd, tmp_name = tempfile.mkstemp(dir=self.out_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(",".join(header) + "\n")
                for row in rows:
                    handle.write(",".join(row) + "\n")
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        self.written.append(path)
        return path

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.out_dir / name
        fd, tmp_name = tempfile.mkstemp(dir=self.out_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
                json.dump(payload, handle, indent=2, sort_keys=True)
                handle.write("\n")
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        self.written.append(path)
        return path

    def discard_all(self) -> None:
        for path in self.written:
            try:
                path.unlink()
            except OSError:
                pass


def _parse_lambdas(args, default: Optional[List[float]] = None) -> List[float]:
    if args.lam is None and args.lambda_sweep is None and default is not None:
        return list(default)
    if args.lambda_sweep is not None:
        parts = args.lambda_sweep.split(":")
        if len(parts) != 3:
            raise ValueError("--lambda-sweep expects START:STOP:COUNT")
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
        if count < 1 or start <= 0 or stop <= 0:
            raise ValueError("--lambda-sweep needs positive bounds and count >= 1")
        if count == 1:
            return [start]
        return list(np.geomspace(start, stop, count))
    lam = args.lam
    if lam is None:
        raise ValueError("one of --lambda or --lambda-sweep is required")
    if lam <= 0:
        raise ValueError("--lambda must be positive")
    return [float(lam)]


def _build_kernel(cfg: RunConfig, dimension: int) -> KernelSpec:
    if cfg.kernel == "matern":
        if cfg.nu is None:
            raise ValueError("--nu is required for the matern kernel")
        return matern(cfg.nu, cfg.length, dimension)
    if cfg.kernel == "gaussian":
        return gaussian(cfg.length, dimension)
    raise ValueError(f"unknown kernel family {cfg.kernel!r}")


def _build_measure(spec: str, cfg: RunConfig):
    """Returns (sample, density_or_None, dimension)."""
    parts = spec.split(":")
    kind = parts[0]
    if kind == "csv":
        if len(parts) != 2:
            raise ValueError("measure csv spec is csv:PATH")
        sample = load_csv(parts[1])
        return sample, None, sample.dimension
    if kind == "riemann":
        if len(parts) != 3:
            raise ValueError("measure riemann spec is riemann:DENSITY:n")
        dens = get_density(parts[1])
        n = int(parts[2])
        if dens.dim == 1:
            (a, b), = dens.grid_bounds
            grid = grid_1d(a, b, n)
            vol = (b - a) / n
        else:
            m = round(math.sqrt(n))
            if m * m != n:
                raise ValueError(f"riemann:{dens.name}:n needs a square n in 2-d, got {n}")
            (a, b), _ = dens.grid_bounds
            grid = grid_2d(a, b, m)
            vol = ((b - a) / m) ** 2
        sample = riemann_from_density(grid, dens.pdf, cell_volume=vol)
        return sample, dens, dens.dim
    if kind == "iid":
        if len(parts) != 4:
            raise ValueError("measure iid spec is iid:DENSITY:n:SEED")
        dens = get_density(parts[1])
        n = int(parts[2])
        seed = int(parts[3])
        cfg.seed = seed
        rng = np.random.default_rng(seed)
        pts = dens.sample(n, rng)
        sample = WeightedSample(pts, np.full(len(pts), 1.0 / len(pts)))
        return sample, dens, dens.dim
    raise ValueError(f"unknown measure spec {spec!r}")


def _build_queries(spec: str, sample: WeightedSample, dimension: int):
    """Returns an (m, d) array or the literal string 'at-support'."""
    if spec == "at-support":
        return "at-support"
    parts = spec.split(":")
    if parts[0] == "csv":
        if len(parts) != 2:
            raise ValueError("queries csv spec is csv:PATH")
        qs = load_csv(parts[1])
        if qs.dimension != dimension:
            raise ValueError(
                f"query dimension {qs.dimension} != measure dimension {dimension}"
            )
        return qs.points
    if parts[0] == "grid":
        if len(parts) != 4:
            raise ValueError("queries grid spec is grid:a:b:m")
        a, b, m = float(parts[1]), float(parts[2]), int(parts[3])
        return grid_1d(a, b, m) if dimension == 1 else grid_2d(a, b, m)
    raise ValueError(f"unknown queries spec {spec!r}")


def _run_metadata(cfg: RunConfig, systems: Sequence[GramSystem] = ()) -> dict:
    meta = asdict(cfg)
    meta["version"] = __version__
    meta["backend"] = active_backend()
    meta["quadrature_rtol"] = 1e-10
    meta["jitter"] = max((s.jitter for s in systems), default=0.0)
    return meta


def _sweep_systems(kernel: KernelSpec, sample: WeightedSample, lambdas: Sequence[float]):
    """One Gram assembly, one factorization per lambda."""
    base = assemble(kernel, sample, lambdas[0])
    yield lambdas[0], base
    for lam in lambdas[1:]:
        yield lam, refit_lambda(base, lam)


def cmd_estimate(cfg: RunConfig, out: _OutputTracker) -> int:
    sample, _dens, dim = _build_measure(cfg.measure, cfg)
    kernel = _build_kernel(cfg, dim)
    profile = SpectralProfile.from_kernel(kernel)
    queries = _build_queries(cfg.queries, sample, dim)
    at_support = isinstance(queries, str)
    points = sample.points if at_support else queries

    header = [f"z{i + 1}" for i in range(dim)] + [
        "lambda",
        "christoffel",
        "leverage",
        "p_hat",
        "label",
    ]
    rows: List[List[str]] = []
    systems = []
    for lam, sys_ in _sweep_systems(kernel, sample, cfg.lambdas):
        systems.append(sys_)
        c_vals = (
            christoffel_at_support_all(sys_)
            if at_support
            else christoffel_at_points(sys_, points)
        )
        for z, c in zip(points, c_vals):
            c = float(c)
            label = support_indicator(profile, lam, c, cfg.margin, cfg.p_min)
            p_hat = _fmt(estimate_density(profile, lam, c)) if label == INSIDE else ""
            rows.append(
                [_fmt(v) for v in z]
                + [_fmt(lam), _fmt(c), _fmt(1.0 / c), p_hat, label]
            )
    out.write_csv("estimates.csv", header, rows)
    out.write_json("run.json", _run_metadata(cfg, systems))
    return 0


def cmd_fig2(cfg: RunConfig, out: _OutputTracker) -> int:
    nus: List[float] = cfg.extra["nus"]
    lam_left: float = cfg.extra["lambda_left"]
    n: int = cfg.extra["n"]
    dens = get_density("sinusoidal")
    (a, b), = dens.grid_bounds
    grid = grid_1d(a, b, n)
    sample = riemann_from_density(grid, dens.pdf, cell_volume=(b - a) / n)
    p_true = dens.pdf(sample.points)

    lambdas = sorted(set(cfg.lambdas) | {lam_left})
    probe_targets = (0.0, 0.25, -0.25, 0.5, -0.5)
    probe_idx = [int(np.argmin(np.abs(sample.points[:, 0] - z))) for z in probe_targets]

    left_rows: List[List[str]] = []
    right_rows: List[List[str]] = []
    systems = []
    for nu in nus:
        kernel = matern(nu, cfg.length, 1)
        profile = SpectralProfile.from_kernel(kernel)
        for lam, sys_ in _sweep_systems(kernel, sample, lambdas):
            systems.append(sys_)
            c_vals = christoffel_at_support_all(sys_)
            if lam == lam_left:
                for z, p, c in zip(sample.points[:, 0], p_true, c_vals):
                    left_rows.append(
                        [
                            _fmt(nu),
                            _fmt(z),
                            _fmt(p),
                            _fmt(c),
                            _fmt(estimate_density(profile, lam, float(c))),
                        ]
                    )
            for i in probe_idx:
                right_rows.append(
                    [
                        _fmt(nu),
                        _fmt(sample.points[i, 0]),
                        _fmt(p_true[i]),
                        _fmt(lam),
                        _fmt(c_vals[i]),
                        _fmt(rate_diagnostic(profile, lam, float(c_vals[i]), float(p_true[i]))),
                    ]
                )
    out.write_csv("fig2_left.csv", ["nu", "z", "p_true", "christoffel", "p_hat"], left_rows)
    out.write_csv(
        "fig2_right.csv", ["nu", "z", "p_true", "lambda", "christoffel", "rate"], right_rows
    )
    out.write_json("run.json", _run_metadata(cfg, systems))
    return 0


def cmd_overfit(cfg: RunConfig, out: _OutputTracker) -> int:
    n: int = cfg.extra["n"]
    spacing: float = cfg.extra["spacing"]
    points = (spacing * np.arange(n)).reshape(-1, 1)
    sample = WeightedSample(points, np.full(n, 1.0 / n))
    kernel = _build_kernel(cfg, 1)
    lam = cfg.lambdas[0]
    sys_ = assemble(kernel, sample, lam)

    mids = 0.5 * (points[:-1, 0] + points[1:, 0])
    queries = np.concatenate([points[:, 0], mids])
    order = np.argsort(queries)
    queries = queries[order].reshape(-1, 1)
    c_vals = christoffel_at_points(sys_, queries)
    nearest = np.abs(queries - points[:, 0][None, :]).argmin(axis=1)
    rows = [
        [_fmt(z[0]), _fmt(c), _fmt(sample.weights[j])]
        for z, c, j in zip(queries, c_vals, nearest)
    ]
    out.write_csv("overfit.csv", ["z", "christoffel", "eta_nearest"], rows)
    out.write_json("run.json", _run_metadata(cfg, [sys_]))
    return 0


def cmd_gaussian_compare(cfg: RunConfig, out: _OutputTracker) -> int:
    n: int = cfg.extra["n"]
    sweep: List[float] = cfg.extra["tail_lambdas"]
    dens = get_density("piecewise")
    (a, b), = dens.grid_bounds
    grid = grid_1d(a, b, n)
    sample = riemann_from_density(grid, dens.pdf, cell_volume=(b - a) / n)
    queries = grid_1d(-1.5, 1.5, cfg.extra["query_count"])

    mat_kernel = matern(cfg.nu if cfg.nu is not None else 1.0, cfg.length, 1)
    gau_kernel = gaussian(cfg.length, 1)
    mat_profile = SpectralProfile.from_kernel(mat_kernel)
    gau_profile = SpectralProfile.from_kernel(gau_kernel)

    lam = cfg.lambdas[0]
    profile_rows: List[List[str]] = []
    systems = []
    for name, kernel in (("matern", mat_kernel), ("gaussian", gau_kernel)):
        sys_ = assemble(kernel, sample, lam)
        systems.append(sys_)
        c_vals = christoffel_at_points(sys_, queries)
        for z, c in zip(queries[:, 0], c_vals):
            profile_rows.append([name, _fmt(z), _fmt(c), _fmt(1.0 / c)])
    out.write_csv(
        "gaussian_compare.csv", ["kernel", "z", "christoffel", "leverage"], profile_rows
    )

    # same epsilon(lambda) for both kernels so the ratios are comparable
    tail_rows: List[List[str]] = []
    for lam_t in sweep:
        eps = default_epsilon(mat_profile, lam_t)
        for name, profile in (("matern", mat_profile), ("gaussian", gau_profile)):
            ratio = tail_mass_ratio(profile, lam_t, eps)
            tail_rows.append([name, _fmt(lam_t), _fmt(eps), _fmt(ratio)])
    out.write_csv("tail_ratios.csv", ["kernel", "lambda", "epsilon", "ratio"], tail_rows)
    out.write_json("run.json", _run_metadata(cfg, systems))
    return 0


def cmd_spectral(cfg: RunConfig, out: _OutputTracker) -> int:
    kernel = _build_kernel(cfg, cfg.extra.get("dimension", 1))
    profile = SpectralProfile.from_kernel(kernel)
    p_z = cfg.extra["p_z"]
    q0_val = kernel.q_zero()

    rows: List[List[str]] = []
    for lam in cfg.lambdas:
        d_val = compute_D(profile, lam)
        if d_val * q0_val / lam < 1.0 - 1e-12:
            raise ArithmeticError(
                f"spectral invariant violated: D(lambda)*q(0)/lambda < 1 at lambda={lam:g}"
            )
        bound_i, bound_ii = predict_outside(profile, lam)
        lead = (
            _fmt(lam**profile.beta / profile.q0) if profile.beta is not None else ""
        )
        rows.append(
            [
                _fmt(lam),
                _fmt(d_val),
                lead,
                _fmt(predict_inside(profile, lam, p_z)),
                _fmt(bound_i),
                _fmt(bound_ii),
            ]
        )
    out.write_csv(
        "spectral.csv",
        ["lambda", "D", "asymptote", "predict_inside", "bound_sqrt", "bound_linear"],
        rows,
    )
    meta = _run_metadata(cfg)
    if profile.q0 is not None:
        meta["q0"] = profile.q0
        meta["q0_closed_form"] = profile.q0_closed_form
        meta["q0_quadrature_limit"] = profile.q0_quadrature_limit
        meta["beta"] = profile.beta
    out.write_json("run.json", meta)
    return 0


def cmd_debug_optimizer(cfg: RunConfig, out: _OutputTracker) -> int:
    """Hidden: dump the extremal function of the constrained problem."""
    sample, _dens, dim = _build_measure(cfg.measure, cfg)
    if dim != 1:
        raise ValueError("debug-optimizer supports d=1 only")
    kernel = _build_kernel(cfg, dim)
    lam = cfg.lambdas[0]
    z = float(cfg.extra["z"])
    a, b, m = cfg.extra["grid"]

    pts = np.vstack([[z], sample.points])
    eta = np.concatenate([[0.0], sample.weights])
    kk = gram_matrix(kernel, pts)
    mm = kk @ np.diag(eta) @ kk + lam * kk
    rhs = kk[:, 0]
    coef = np.linalg.lstsq(mm, rhs, rcond=None)[0]
    coef /= rhs @ coef

    xs = grid_1d(a, b, m)
    from .kernels import cross_matrix

    vals = cross_matrix(kernel, xs, pts) @ coef
    rows = [[_fmt(x[0]), _fmt(v)] for x, v in zip(xs, vals)]
    out.write_csv("optimizer.csv", ["x", "f_star"], rows)
    out.write_json("run.json", _run_metadata(cfg))
    return 0


def _add_common(parser: argparse.ArgumentParser, *, queries: bool = True) -> None:
    parser.add_argument("--kernel", choices=["matern", "gaussian"], default="matern")
    parser.add_argument("--nu", type=float, default=None, help="Matern smoothness")
    parser.add_argument("--length", type=float, default=1.0, help="kernel length scale")
    parser.add_argument("--lambda", dest="lam", type=float, default=None)
    parser.add_argument(
        "--lambda-sweep", default=None, help="geometric sweep START:STOP:COUNT"
    )
    if queries:
        parser.add_argument("--measure", required=True, help="csv:PATH | riemann:DENSITY:n | iid:DENSITY:n:SEED")
        parser.add_argument("--queries", default="at-support", help="csv:PATH | grid:a:b:m | at-support")
    parser.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    parser.add_argument("--p-min", type=float, default=DEFAULT_P_MIN)
    parser.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="christoffel",
        description="Regularized Christoffel functions, leverage scores and density recovery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="evaluate the pipeline on a measure")
    _add_common(p_est)

    p_fig2 = sub.add_parser("fig2", help="density-recovery and rate experiments")
    _add_common(p_fig2, queries=False)
    p_fig2.add_argument("--n", type=int, default=2000, help="Riemann grid size")
    p_fig2.add_argument("--nus", default="0.5,1.0,1.5", help="comma-separated Matern nu values")
    p_fig2.add_argument("--lambda-left", type=float, default=1e-4)

    p_over = sub.add_parser("overfit", help="small-n overfitting demonstration")
    _add_common(p_over, queries=False)
    p_over.add_argument("--n", type=int, default=15)
    p_over.add_argument("--spacing", type=float, default=10.0)

    p_gc = sub.add_parser("gaussian-compare", help="Matern vs Gaussian on a discontinuous density")
    _add_common(p_gc, queries=False)
    p_gc.add_argument("--n", type=int, default=400)
    p_gc.add_argument("--query-count", type=int, default=301)
    p_gc.add_argument("--tail-sweep", default="1e-2:1e-6:5")

    p_sp = sub.add_parser("spectral", help="D(lambda), asymptote and envelopes over a sweep")
    _add_common(p_sp, queries=False)
    p_sp.add_argument("--dimension", type=int, default=1)
    p_sp.add_argument("--p-z", type=float, default=1.0)

    p_dbg = sub.add_parser("debug-optimizer")  # intentionally undocumented
    _add_common(p_dbg)
    p_dbg.add_argument("--z", type=float, required=True)
    p_dbg.add_argument("--grid", default="-2:2:401")

    return parser


_LAMBDA_DEFAULTS = {
    "fig2": list(np.geomspace(1e-5, 1e-2, 10)),
    "overfit": [1e-3],
    "gaussian-compare": [1e-3],
}


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        kernel=getattr(args, "kernel", "matern"),
        nu=getattr(args, "nu", None),
        length=getattr(args, "length", 1.0),
        lambdas=_parse_lambdas(args, _LAMBDA_DEFAULTS.get(args.command)),
        measure=getattr(args, "measure", ""),
        queries=getattr(args, "queries", "at-support"),
        margin=args.margin,
        p_min=args.p_min,
        out=args.out,
    )
    if cfg.kernel == "matern" and cfg.nu is None:
        cfg.nu = 0.5
    if args.command == "fig2":
        cfg.extra = {
            "n": args.n,
            "nus": [float(v) for v in args.nus.split(",") if v],
            "lambda_left": args.lambda_left,
        }
    elif args.command == "overfit":
        cfg.extra = {"n": args.n, "spacing": args.spacing}
    elif args.command == "gaussian-compare":
        parts = args.tail_sweep.split(":")
        if len(parts) != 3:
            raise ValueError("--tail-sweep expects START:STOP:COUNT")
        sweep = list(np.geomspace(float(parts[0]), float(parts[1]), int(parts[2])))
        cfg.extra = {"n": args.n, "query_count": args.query_count, "tail_lambdas": sweep}
        if cfg.nu is None:
            cfg.nu = 0.5
    elif args.command == "spectral":
        cfg.extra = {"dimension": args.dimension, "p_z": args.p_z}
    elif args.command == "debug-optimizer":
        g = args.grid.split(":")
        cfg.extra = {"z": args.z, "grid": (float(g[0]), float(g[1]), int(g[2]))}
    return cfg


_COMMANDS = {
    "estimate": cmd_estimate,
    "fig2": cmd_fig2,
    "overfit": cmd_overfit,
    "gaussian-compare": cmd_gaussian_compare,
    "spectral": cmd_spectral,
    "debug-optimizer": cmd_debug_optimizer,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    tracker: Optional[_OutputTracker] = None
    try:
        cfg = _config_from_args(args)
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        tracker = _OutputTracker(out_dir)
        return _COMMANDS[args.command](cfg, tracker)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"christoffel {args.command}: error: {exc}", file=sys.stderr)
        if tracker is not None:
            tracker.discard_all()
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
