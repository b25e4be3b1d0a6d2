"""Command-line front end.

Every command takes one JSON config file (see :mod:`qprop.config`). Failures
print a single line ``E<code> <KIND> <detail>`` to stderr and exit with

    2  configuration error (names the offending key)
    3  factor-coefficient blow-up (retry with more time slices)
    4  spectral stability cap exceeded (names the factor)
    5  oracle failure (Fock cutoff leakage, non-decaying integrand)
    1  anything else
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .eom import assemble
from .exceptions import BlowUpError, CutoffLeakageError, RepresentationError, StabilityError, UnsupportedError
from .gridio import format_number, read_grid, write_columns, write_grid, write_json
from .oracle import ANALYTIC_CASES, FockDensityMatrix, analytic_solution, evolve_rho, rho_to_qdf
from .ordering import ORDERING_NAMES, named_ordering
from .phasegrid import PhaseGrid, convert_ordering, propagate_piecewise
from .states import StateSpec, initial_qdf
from .weinorman import IntegratorConfig, integrate

__all__ = ["main", "build_parser"]

EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_STABILITY = 4
EXIT_ORACLE = 5


class OracleError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# helpers


def _initial(cfg: RunConfig, g) -> PhaseGrid:
    cfg.need("state", "grid")
    try:
        return initial_qdf(cfg.state, g, cfg.grid, cap=cfg.cap)
    except StabilityError:
        raise
    except ValueError as exc:
        raise ConfigError("state", str(exc)) from None


def _out_dir(cfg: RunConfig, required: bool = True) -> Path | None:
    path = cfg.output.path
    if path is None:
        if required:
            raise ConfigError("output.path", "missing")
        return None
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("output.path", f"cannot create {path}: {exc.strerror}") from None
    return path


def _ext(cfg: RunConfig) -> str:
    return ".npz" if cfg.output.format == "npz" else ".csv"


def _cfg_int(cfg: RunConfig) -> IntegratorConfig:
    return IntegratorConfig(dt=cfg.time.dt)


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _run_pipeline(cfg: RunConfig, g, on_slice=None, n_out: int = 2) -> tuple[PhaseGrid, PhaseGrid]:
    cfg.need("model", "state", "grid")
    F0 = _initial(cfg, g)
    F = propagate_piecewise(
        F0, cfg.model, g, cfg.time.T, slices=cfg.time.slices, cfg=_cfg_int(cfg),
        cap=cfg.cap, on_slice=on_slice, n_out=n_out,
    )
    return F0, F


# ---------------------------------------------------------------------------
# commands


def cmd_propagate(cfg: RunConfig) -> int:
    cfg.need("model", "ordering", "state", "grid")
    out = _out_dir(cfg)
    rows_t, rows_w, slice_starts = [], [], []

    def record(t0, traj):
        slice_starts.append(t0)
        rows_t.extend(t0 + traj.times)
        rows_w.extend(traj.w)

    n_out = max(2, math.ceil(cfg.time.n_out / cfg.time.slices))
    F0, F = _run_pipeline(cfg, cfg.ordering, record, n_out)
    ext = _ext(cfg)
    write_grid(out / f"initial{ext}", F0, cfg.output.format)
    write_grid(out / f"final{ext}", F, cfg.output.format)
    write_columns(
        out / "trajectory.csv", rows_t, np.array(rows_w).reshape(-1, 9), "w",
        comment="factor coefficients; each slice restarts from w = 0 at its start time",
    )
    write_json(
        out / "run.json",
        {
            "command": "propagate",
            "version": __version__,
            "ordering": list(cfg.ordering.as_tuple()),
            "T": cfg.time.T,
            "slices": cfg.time.slices,
            "slice_starts": slice_starts,
            "normalization_initial": _complex_pair(F0.normalization()),
            "normalization_final": _complex_pair(F.normalization()),
        },
    )
    return 0


def cmd_convert(cfg: RunConfig) -> int:
    cfg.need("ordering_to")
    out = _out_dir(cfg)
    if cfg.input is not None:
        try:
            F = read_grid(cfg.input)
        except (OSError, ValueError) as exc:
            raise ConfigError("input", str(exc)) from None
        g_from = cfg.ordering_from or F.ordering
        if cfg.ordering_from is not None and F.ordering != cfg.ordering_from:
            raise ConfigError("ordering_from", f"input grid is in ordering ({F.ordering}), not ({cfg.ordering_from})")
    else:
        cfg.need("ordering_from", "state", "grid")
        g_from = cfg.ordering_from
        F = _initial(cfg, g_from)
    G = convert_ordering(F, g_from, cfg.ordering_to, cap=cfg.cap)
    ext = _ext(cfg)
    write_grid(out / f"initial{ext}", F, cfg.output.format)
    write_grid(out / f"converted{ext}", G, cfg.output.format)
    return 0


def cmd_wn(cfg: RunConfig) -> int:
    cfg.need("model", "ordering")
    T = cfg.time.T
    traj = integrate(assemble(cfg.model, cfg.ordering), T, _cfg_int(cfg), t_out=np.linspace(0.0, T, cfg.time.n_out))
    out = _out_dir(cfg, required=False)
    write_columns(out / "wn.csv" if out else sys.stdout, traj.times, traj.w, "w")
    return 0


def cmd_coeffs(cfg: RunConfig) -> int:
    cfg.need("model", "ordering")
    t = np.linspace(0.0, cfg.time.T, cfg.time.n_out)
    a = assemble(cfg.model, cfg.ordering)(t).T
    out = _out_dir(cfg, required=False)
    write_columns(out / "coeffs.csv" if out else sys.stdout, t, a, "a")
    return 0


def _state_rho(spec: StateSpec, dim: int) -> FockDensityMatrix:
    if spec.kind == "ground":
        return FockDensityMatrix.ground(dim)
    if spec.kind == "coherent":
        return FockDensityMatrix.coherent(spec.alpha, dim)
    if spec.kind == "cat":
        return FockDensityMatrix.cat(spec.alpha, dim)
    return FockDensityMatrix.superposition01(dim)


def cmd_compare(cfg: RunConfig, oracle: str) -> int:
    cfg.need("model", "ordering", "state", "grid")
    if oracle not in ("fock", "initial") and oracle not in ANALYTIC_CASES:
        raise ConfigError("--oracle", f"unknown oracle {oracle!r}; expected fock, initial or one of {', '.join(ANALYTIC_CASES)}")
    out = _out_dir(cfg)
    g, T = cfg.ordering, cfg.time.T
    F0, A = _run_pipeline(cfg, g)
    if oracle == "initial":
        B = F0
    elif oracle == "fock":
        try:
            rho = evolve_rho(_state_rho(cfg.state, cfg.oracle.cutoff), cfg.model, T, dt=cfg.oracle.dt)
            B = rho_to_qdf(rho, g, cfg.grid)
        except CutoffLeakageError:
            raise
        except ValueError as exc:
            raise OracleError(str(exc)) from None
    else:
        params = {"alpha": cfg.state.alpha, "ordering": g, **cfg.oracle.params}
        try:
            B = analytic_solution(oracle, params, cfg.grid, T)
        except (KeyError, ValueError) as exc:
            raise ConfigError("oracle.params", f"{oracle}: {exc}") from None
        if B.ordering != g:
            raise ConfigError("ordering", f"oracle {oracle} is in ordering ({B.ordering}), config asks for ({g})")
    d = A.values - B.values
    geo = cfg.grid
    report = {
        "oracle": oracle,
        "t": T,
        "l2": float(np.sqrt(np.sum(np.abs(d) ** 2) * geo.dq * geo.dp)),
        "linf": float(np.abs(d).max()),
        "normalization_a": float(A.normalization().real),
        "normalization_b": float(B.normalization().real),
    }
    ext = _ext(cfg)
    write_grid(out / f"pipeline{ext}", A, cfg.output.format)
    write_grid(out / f"oracle{ext}", B, cfg.output.format)
    write_json(out / "report.json", report)
    print(f"l2={format_number(report['l2'])} linf={format_number(report['linf'])}")
    return 0


def cmd_orderings() -> int:
    for name in ORDERING_NAMES:
        if name == "s-ordered":
            print("s-ordered     s/4,s/4,0")
        else:
            print(f"{name:<13} {named_ordering(name)}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qprop", description="Propagate Gaussian-class quasi-distribution functions.")
    ap.add_argument("--version", action="version", version=f"qprop {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in [
        ("propagate", "propagate an initial state and write grids, trajectory and metadata"),
        ("convert", "re-express a QDF in another ordering"),
        ("wn", "write factor coefficients w1..w9 on a time mesh"),
        ("coeffs", "write equation-of-motion coefficients a1..a9 on a time mesh"),
    ]:
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="JSON run configuration")
    p = sub.add_parser("compare", help="compare the pipeline against an oracle")
    p.add_argument("config", help="JSON run configuration")
    p.add_argument("--oracle", required=True, help="fock, initial, or an analytic case id")
    sub.add_parser("orderings", help="list named orderings and their kernel parameters")
    return ap


def _warning_line(message, category, filename, lineno, file=None, line=None):
    print(f"W {category.__name__}: {message}", file=sys.stderr)


def _fail(code: int, kind: str, detail: str) -> int:
    print(f"E{code} {kind} {detail}".replace("\n", " "), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    warnings.showwarning = _warning_line
    try:
        if args.command == "orderings":
            return cmd_orderings()
        cfg = load_config(args.config)
        if args.command == "propagate":
            return cmd_propagate(cfg)
        if args.command == "convert":
            return cmd_convert(cfg)
        if args.command == "wn":
            return cmd_wn(cfg)
        if args.command == "coeffs":
            return cmd_coeffs(cfg)
        return cmd_compare(cfg, args.oracle)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "CONFIG", str(exc))
    except (RepresentationError, UnsupportedError) as exc:
        return _fail(EXIT_CONFIG, "CONFIG", f"model: {exc}")
    except BlowUpError as exc:
        return _fail(EXIT_BLOWUP, "BLOWUP", f"t={exc.t:.6g}: {exc}")
    except StabilityError as exc:
        return _fail(EXIT_STABILITY, "STABILITY", f"{exc.factor}: {exc}")
    except (CutoffLeakageError, OracleError) as exc:
        return _fail(EXIT_ORACLE, "ORACLE", str(exc))
    except Exception as exc:  # noqa: BLE001 - last-resort single-line report
        return _fail(1, "INTERNAL", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
