"""Command-line driver.

    besselfrac forward --func poly43 --alpha 0.5 --T 1 --K 40 --out-dir run1
    besselfrac invert-initial --in-f run1/coeffs.json --in-g poly43 --K 40 --out-dir run2
    besselfrac --config run2/report.json --out-dir run3      # exact rerun

Every run writes ``values.csv`` (or ``amplification.csv`` / ``sweep.csv``),
``coeffs.json`` and ``report.json`` into ``--out-dir``.  Exit codes: 2 invalid
configuration, 3 unreadable input, 4 ill-posed reconstruction overflow.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .basis import (
    BesselBasis,
    Quadrature,
    SpectralField,
    analyze,
    compute_zeros,
    decay_exponent,
    default_quad_order,
    gauss_legendre,
    partial_sum_deltas,
    synthesize,
    synthesize_second_derivative,
    weighted_l2_norm,
)
from .errors import BesselFracError, DegenerateDecayError, DomainError, IllPosednessError
from .files import (
    ParseError,
    coeffs_json,
    dump_json,
    grid_csv,
    read_coeffs_json,
    read_grid_csv,
    spacetime_csv,
    table_csv,
    write_outputs,
)
from .forward import propagate
from .funcs import builtin_field, is_builtin
from .inverse import (
    RESIDUAL_NODES,
    Problem,
    add_noise,
    amplification_profile,
    invert_initial,
    invert_source,
)
from .specfun import FracOrder

__all__ = ["RunConfig", "ConfigError", "run", "convergence_sweep", "main"]

PROBLEMS = ("forward", "forward-source", "invert-initial", "invert-source", "diagnostics", "sweep")

EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_ILLPOSED = 4

_TOLERANCES = {"residual_nodes": RESIDUAL_NODES, "quadrature_rule": "gauss-legendre", "csv_digits": 17}


class ConfigError(BesselFracError, ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class RunConfig:
    problem: str
    alpha: float = 0.5
    T: float = 1.0
    K: int = 50
    quad_order: Optional[int] = None
    grid: int = 101
    noise: float = 0.0
    seed: int = 0
    func: Optional[str] = None
    in_g: Optional[str] = None
    in_f: Optional[str] = None
    in_h: Optional[str] = None
    times: Optional[tuple] = None
    cutoff: Optional[float] = None
    k_list: tuple = (10, 20, 40, 80)
    out_dir: str = field(default=".", compare=False)

    def __post_init__(self) -> None:
        if self.quad_order is None:
            object.__setattr__(self, "quad_order", default_quad_order(self.K))
        self.validate()

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise ConfigError("problem", f"must be one of {', '.join(PROBLEMS)}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha", f"must lie in (0, 1), got {self.alpha!r}")
        if not self.T > 0.0:
            raise ConfigError("T", f"must be positive, got {self.T!r}")
        if int(self.K) != self.K or self.K < 1:
            raise ConfigError("K", f"must be a positive integer, got {self.K!r}")
        if self.quad_order < 4 * self.K:
            raise ConfigError("quad_order", f"{self.quad_order} is below 4K = {4 * self.K}")
        if self.grid < 2:
            raise ConfigError("grid", f"resolution must be at least 2, got {self.grid!r}")
        if not self.noise >= 0.0:
            raise ConfigError("noise", f"must be non-negative, got {self.noise!r}")
        if self.func is not None and not is_builtin(self.func):
            raise ConfigError("func", f"unknown built-in {self.func!r}; use poly43, poly44, poly21 or mode:k")
        if self.cutoff is not None and not self.cutoff > 0:
            raise ConfigError("cutoff", "must be positive")
        if self.times is not None:
            if any(not 0.0 <= t <= self.T for t in self.times):
                raise ConfigError("times", f"every time must lie in [0, T={self.T}]")
        ks = list(self.k_list)
        if not ks or any(b <= a for a, b in zip(ks, ks[1:])) or ks[0] < 1:
            raise ConfigError("k_list", "must be a strictly increasing list of positive integers")
        if self.problem == "invert-source" and self.in_f is None:
            raise ConfigError("in_f", "invert-source needs the final data --in-f")

    def echo(self) -> dict:
        """Everything needed to reproduce the run, minus the output location."""
        d = dataclasses.asdict(self)
        d.pop("out_dir")
        d["times"] = list(self.times) if self.times is not None else None
        d["k_list"] = list(self.k_list)
        return d

    @classmethod
    def from_echo(cls, data: dict, out_dir: str) -> "RunConfig":
        data = dict(data)
        if data.get("times") is not None:
            data["times"] = tuple(data["times"])
        if "k_list" in data:
            data["k_list"] = tuple(data["k_list"])
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError("config", f"unknown keys {sorted(unknown)}")
        return cls(out_dir=out_dir, **data)


# ---------------------------------------------------------------------------


def _load(source: str, basis: BesselBasis, quad: Quadrature) -> SpectralField:
    """Resolve a built-in name, a ``.json`` coefficient file or an ``x,value`` CSV."""
    if is_builtin(source):
        try:
            return builtin_field(source, basis, quad)
        except DomainError as exc:
            raise ConfigError("func", str(exc)) from None
    if source.endswith(".json"):
        return read_coeffs_json(source, basis)
    grid = read_grid_csv(source)
    try:
        return analyze(grid, basis, quad)
    except DomainError as exc:
        raise ParseError(f"{source}: {exc}") from None


def _output_nodes(cfg: RunConfig) -> np.ndarray:
    return np.linspace(0.0, 1.0, cfg.grid)


def _rel_error(got: SpectralField, truth: SpectralField, basis: BesselBasis) -> float:
    den = weighted_l2_norm(truth, basis)
    num = weighted_l2_norm(got - truth, basis)
    return num / den if den > 0 else num


def run(cfg: RunConfig) -> dict[str, str]:
    """Execute one configuration and return ``{file name: contents}``.

    Nothing is written here; :func:`main` writes the files only after the
    whole computation has succeeded.
    """
    if cfg.problem == "sweep":
        return convergence_sweep(cfg, cfg.k_list)
    basis = compute_zeros(cfg.K)
    quad = gauss_legendre(cfg.quad_order)
    frac = FracOrder(cfg.alpha, cfg.T)
    x = _output_nodes(cfg)
    amp_initial = amplification_profile(frac, basis, Problem.INITIAL)
    amp_source = amplification_profile(frac, basis, Problem.SOURCE)
    report: dict = {
        "version": __version__,
        "config": cfg.echo(),
        "K": cfg.K,
        "Q": cfg.quad_order,
        "tolerances": _TOLERANCES,
    }
    files: dict[str, str] = {}

    if cfg.problem in ("forward", "forward-source"):
        g = _load(cfg.in_g or cfg.func or "poly43", basis, quad)
        g = add_noise(g, cfg.noise, cfg.seed)
        h = None
        if cfg.problem == "forward-source":
            h = _load(cfg.in_h or "poly44", basis, quad)
        u_T = propagate(g, frac, basis, cfg.T, h)
        if cfg.times is not None:
            samples = [(t, synthesize(propagate(g, frac, basis, t, h), basis, x)) for t in cfg.times]
            files["values.csv"] = spacetime_csv(samples)
        else:
            files["values.csv"] = grid_csv(synthesize(u_T, basis, x))
        files["coeffs.json"] = coeffs_json(u_T, basis)
        report["residual"] = abs(synthesize(u_T, basis, [1.0]).values[0])
        report["residual_kind"] = "boundary |u(1,T)|"
        report["amplification"] = {"initial": amp_initial, "source": amp_source}

    elif cfg.problem == "invert-initial":
        f = _load(cfg.in_f or cfg.func or "poly43", basis, quad)
        f = add_noise(f, cfg.noise, cfg.seed)
        rep = invert_initial(f, frac, basis, cfg.cutoff)
        g = rep.recovered_initial
        files["values.csv"] = grid_csv(synthesize(g, basis, x))
        files["coeffs.json"] = coeffs_json(g, basis)
        report["residual"] = rep.residual
        report["residual_kind"] = "sup |u(.,T) - f| on 101 nodes"
        report["amplification"] = {"initial": rep.amplification}
        report["dropped_modes"] = rep.dropped_modes
        if cfg.in_g is not None:
            truth = _load(cfg.in_g, basis, quad)
            report["l2_error_relative"] = _rel_error(g, truth, basis)

    elif cfg.problem == "invert-source":
        g = _load(cfg.in_g or cfg.func or "poly43", basis, quad)
        f = _load(cfg.in_f, basis, quad)
        f = add_noise(f, cfg.noise, cfg.seed)
        rep = invert_source(g, f, frac, basis, cfg.cutoff)
        h = rep.recovered_source
        files["values.csv"] = grid_csv(synthesize(h, basis, x))
        files["coeffs.json"] = coeffs_json(h, basis)
        report["residual"] = rep.residual
        report["residual_kind"] = "sup |u(.,T) - f| on 101 nodes"
        report["amplification"] = {"source": rep.amplification}
        report["dropped_modes"] = rep.dropped_modes
        if cfg.in_h is not None:
            truth = _load(cfg.in_h, basis, quad)
            report["l2_error_relative"] = _rel_error(h, truth, basis)

    else:  # diagnostics
        rows = [
            (k + 1, lam, ai, as_)
            for k, (lam, ai, as_) in enumerate(zip(basis.zeros, amp_initial, amp_source))
        ]
        files["amplification.csv"] = table_csv(["k", "lambda_k", "initial", "source"], rows)
        name = cfg.in_f or cfg.func or "poly43"
        data = _load(name, basis, quad)
        files["coeffs.json"] = coeffs_json(data, basis)
        report["amplification"] = {"initial": amp_initial, "source": amp_source}
        report["residual"] = 0.0
        report["residual_kind"] = "none (no reconstruction)"
        try:
            report["decay_exponent"] = decay_exponent(data, basis)
        except (DomainError, DegenerateDecayError) as exc:
            report["decay_exponent"] = None
            report["decay_note"] = str(exc)

    files["report.json"] = dump_json(report)
    return files


def convergence_sweep(cfg: RunConfig, k_list) -> dict[str, str]:
    """Sup-norm differences between consecutive partial sums over ``k_list``.

    The data ``--in-f``/``--func`` is inverted at the largest truncation.
    Without ``--in-g`` this is the initial problem and the columns are
    ``u(., T/2)``, the recovered ``g`` and ``u_xx(., T/2)``; with ``--in-g``
    it is the source problem and the middle column is the recovered ``h``.
    """
    ks = [int(k) for k in k_list]
    Kmax = ks[-1]
    basis = compute_zeros(Kmax)
    quad = gauss_legendre(max(cfg.quad_order, default_quad_order(Kmax)))
    frac = FracOrder(cfg.alpha, cfg.T)
    x = _output_nodes(cfg)
    f = _load(cfg.in_f or cfg.func or "poly43", basis, quad)
    f = add_noise(f, cfg.noise, cfg.seed)
    t_mid = 0.5 * cfg.T
    if cfg.in_g is None:
        rep = invert_initial(f, frac, basis, cfg.cutoff)
        recovered, label = rep.recovered_initial, "g"
        u_mid = propagate(recovered, frac, basis, t_mid)
    else:
        g = _load(cfg.in_g, basis, quad)
        rep = invert_source(g, f, frac, basis, cfg.cutoff)
        recovered, label = rep.recovered_source, "h"
        u_mid = propagate(g, frac, basis, t_mid, recovered)
    d_u = partial_sum_deltas(u_mid, basis, ks, x)
    d_r = partial_sum_deltas(recovered, basis, ks, x)
    d_xx = partial_sum_deltas(u_mid, basis, ks, x, profile=synthesize_second_derivative)
    rows = [(a, b, du, dr, dxx) for a, b, du, dr, dxx in zip(ks, ks[1:], d_u, d_r, d_xx)]
    header = ["K_from", "K_to", "delta_u", f"delta_{label}", "delta_uxx"]
    report = {
        "version": __version__,
        "config": cfg.echo(),
        "K": Kmax,
        "Q": quad.order,
        "t_eval": t_mid,
        "residual": rep.residual,
        "amplification": {("initial" if label == "g" else "source"): rep.amplification},
        "tolerances": _TOLERANCES,
    }
    return {
        "sweep.csv": table_csv(header, rows),
        "coeffs.json": coeffs_json(recovered, basis),
        "report.json": dump_json(report),
    }


# ---------------------------------------------------------------------------


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="besselfrac",
        description="Forward and inverse time-fractional diffusion with the Bessel operator.",
    )
    p.add_argument("command", nargs="?", choices=PROBLEMS, help="problem to solve")
    p.add_argument("--problem", choices=PROBLEMS, help="same as the positional command")
    p.add_argument("--alpha", type=float, default=0.5, help="Caputo order in (0, 1)")
    p.add_argument("--T", type=float, default=1.0, help="final time")
    p.add_argument("--K", type=int, default=50, help="number of Fourier-Bessel modes")
    p.add_argument("--quad-order", type=int, default=None, help="Gauss-Legendre order (>= 4K)")
    p.add_argument("--grid", type=int, default=101, help="number of output nodes on [0, 1]")
    p.add_argument("--noise", type=float, default=0.0, help="relative noise level on the data")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.add_argument("--func", help="built-in input: poly43, poly44, poly21 or mode:k")
    p.add_argument("--in-g", help="initial state: built-in name, .json coefficients or x,value CSV")
    p.add_argument("--in-f", help="final state u(., T): built-in name, .json or CSV")
    p.add_argument("--in-h", help="source: built-in name, .json or CSV")
    p.add_argument("--times", type=_floats, help="comma-separated output times (forward only)")
    p.add_argument("--cutoff", type=float, help="drop modes whose amplification exceeds this")
    p.add_argument("--K-list", type=_ints, default=(10, 20, 40, 80), help="truncations for sweep")
    p.add_argument("--out-dir", default=".", help="directory receiving all output files")
    p.add_argument("--config", help="rerun the config echoed in a report.json")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"{args.config}: {exc}") from None
        data = data.get("config", data) if isinstance(data, dict) else data
        if not isinstance(data, dict):
            raise ParseError(f"{args.config}: no config object found")
        return RunConfig.from_echo(data, args.out_dir)
    problem = args.command or args.problem
    if problem is None:
        raise ConfigError("problem", "give a command or --problem")
    if args.command and args.problem and args.command != args.problem:
        raise ConfigError("problem", "positional command and --problem disagree")

    def absolute(p):
        if p is None or is_builtin(p):
            return p
        return str(Path(p).resolve())

    return RunConfig(
        problem=problem,
        alpha=args.alpha,
        T=args.T,
        K=args.K,
        quad_order=args.quad_order,
        grid=args.grid,
        noise=args.noise,
        seed=args.seed,
        func=args.func,
        in_g=absolute(args.in_g),
        in_f=absolute(args.in_f),
        in_h=absolute(args.in_h),
        times=args.times,
        cutoff=args.cutoff,
        k_list=tuple(args.K_list),
        out_dir=args.out_dir,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        files = run(cfg)
    except ConfigError as exc:
        print(f"besselfrac: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"besselfrac: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except IllPosednessError as exc:
        print(f"besselfrac: ill-posed: {exc}", file=sys.stderr)
        return EXIT_ILLPOSED
    except (DomainError, TypeError) as exc:
        print(f"besselfrac: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_outputs(cfg.out_dir, files)
    return 0


if __name__ == "__main__":
    sys.exit(main())
