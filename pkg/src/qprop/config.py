"""Run configuration: a JSON document validated before any numerics run.

Example::

    {
      "model": {"hamiltonian": {"coherent": {"omega": 1.0}},
                "damping": {"gamma": 0.2, "N": 0.5, "M": [0, 0]}},
      "ordering": "wigner",
      "state": {"kind": "cat", "alpha": [1.5, 0.0]},
      "grid": {"nq": 256, "np": 256, "qmin": -8, "qmax": 8, "pmin": -8, "pmax": 8},
      "time": {"T": 0.8, "dt": 1e-3, "slices": 1, "n_out": 11},
      "output": {"path": "run1", "format": "csv"}
    }

Every validation failure raises :class:`ConfigError` carrying the dotted key.
"""

from __future__ import annotations

import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .model import CoefficientFn, CoherentHamiltonian, DampingSpec, QPHamiltonian, QuadraticModel
from .ordering import OrderingParams, parse_ordering
from .phasegrid import Geometry
from .states import StateSpec

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
        self.message = message


def _real(value: Any, key: str, *, positive: bool = False, nonneg: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(key, f"expected a number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise ConfigError(key, "must be finite")
    if positive and not x > 0:
        raise ConfigError(key, f"must be > 0, got {x}")
    if nonneg and not x >= 0:
        raise ConfigError(key, f"must be >= 0, got {x}")
    return x


def _int(value: Any, key: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value}")
    return int(value)


def _complex(value: Any, key: str) -> complex:
    """A complex number written as ``[re, im]`` or a plain real."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(key, "expected [re, im]")
        return complex(_real(value[0], key + "[0]"), _real(value[1], key + "[1]"))
    return complex(_real(value, key))


def _mapping(value: Any, key: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(key, f"expected an object, got {type(value).__name__}")
    extra = sorted(set(value) - allowed)
    if extra:
        raise ConfigError(f"{key}.{extra[0]}", f"unknown key (allowed: {', '.join(sorted(allowed))})")
    return value


def _coefficient(value: Any, key: str) -> CoefficientFn:
    """``c`` or ``[[amp, rate], ...]`` meaning sum amp * exp(rate t)."""
    if isinstance(value, numbers.Real) and not isinstance(value, bool):
        return CoefficientFn.constant(_real(value, key))
    if not isinstance(value, list):
        raise ConfigError(key, "expected a number or a list of [amp, rate] pairs")
    pairs = []
    for i, pair in enumerate(value):
        k = f"{key}[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(k, "expected [amp, rate]")
        pairs.append((_real(pair[0], k + "[0]"), _real(pair[1], k + "[1]")))
    return CoefficientFn.from_pairs(pairs)


def parse_model(value: Any, key: str = "model") -> QuadraticModel:
    m = _mapping(value, key, {"hamiltonian", "damping"})
    if "hamiltonian" not in m:
        raise ConfigError(key + ".hamiltonian", "missing")
    h = _mapping(m["hamiltonian"], key + ".hamiltonian", {"coherent", "qp"})
    if len(h) != 1:
        raise ConfigError(key + ".hamiltonian", "give exactly one of 'coherent' or 'qp'")
    damping = None
    if m.get("damping") is not None:
        dk = key + ".damping"
        d = _mapping(m["damping"], dk, {"gamma", "N", "M"})
        if "gamma" not in d:
            raise ConfigError(dk + ".gamma", "missing")
        damping = DampingSpec(
            _real(d["gamma"], dk + ".gamma", nonneg=True),
            _real(d.get("N", 0.0), dk + ".N", nonneg=True),
            _complex(d.get("M", 0.0), dk + ".M"),
        )
    if "coherent" in h:
        ck = key + ".hamiltonian.coherent"
        c = _mapping(h["coherent"], ck, {"omega", "V", "A"})
        ham = CoherentHamiltonian(
            _real(c.get("omega", 0.0), ck + ".omega"),
            _complex(c.get("V", 0.0), ck + ".V"),
            _complex(c.get("A", 0.0), ck + ".A"),
        )
        return QuadraticModel.from_coherent(ham, damping)
    qk = key + ".hamiltonian.qp"
    q = _mapping(h["qp"], qk, {"k1", "k2", "k3", "k4", "k5"})
    ham = QPHamiltonian(**{k: _coefficient(v, f"{qk}.{k}") for k, v in q.items()})
    try:
        return QuadraticModel(ham, None, damping)
    except ValueError as exc:
        raise ConfigError(key + ".damping", str(exc)) from None


def parse_ordering_key(value: Any, key: str) -> OrderingParams:
    try:
        return parse_ordering(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(key, str(exc)) from None


def parse_state(value: Any, key: str = "state") -> StateSpec:
    s = _mapping(value, key, {"kind", "alpha"})
    if "kind" not in s:
        raise ConfigError(key + ".kind", "missing")
    try:
        return StateSpec(str(s["kind"]), _complex(s.get("alpha", 0.0), key + ".alpha"))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(key + ".kind", str(exc)) from None


def parse_grid(value: Any, key: str = "grid") -> Geometry:
    g = _mapping(value, key, {"nq", "np", "qmin", "qmax", "pmin", "pmax"})
    for k in ("nq", "np", "qmin", "qmax", "pmin", "pmax"):
        if k not in g:
            raise ConfigError(f"{key}.{k}", "missing")
    try:
        return Geometry(
            _int(g["nq"], key + ".nq", 8), _int(g["np"], key + ".np", 8),
            _real(g["qmin"], key + ".qmin"), _real(g["qmax"], key + ".qmax"),
            _real(g["pmin"], key + ".pmin"), _real(g["pmax"], key + ".pmax"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(key, str(exc)) from None


@dataclass(frozen=True)
class TimeSpec:
    T: float = 0.0
    dt: float | None = None
    slices: int = 1
    n_out: int = 11


def parse_time(value: Any, key: str = "time") -> TimeSpec:
    t = _mapping(value, key, {"T", "dt", "slices", "n_out"})
    if "T" not in t:
        raise ConfigError(key + ".T", "missing")
    dt = t.get("dt")
    return TimeSpec(
        _real(t["T"], key + ".T", nonneg=True),
        None if dt is None else _real(dt, key + ".dt", positive=True),
        _int(t.get("slices", 1), key + ".slices"),
        _int(t.get("n_out", 11), key + ".n_out", 2),
    )


@dataclass(frozen=True)
class OutputSpec:
    path: Path | None = None
    format: str = "csv"


def parse_output(value: Any, key: str = "output") -> OutputSpec:
    o = _mapping(value, key, {"path", "format"})
    fmt = o.get("format", "csv")
    if fmt not in ("csv", "npz"):
        raise ConfigError(key + ".format", f"expected 'csv' or 'npz', got {fmt!r}")
    path = o.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError(key + ".path", "expected a string")
    return OutputSpec(None if path is None else Path(path), fmt)


@dataclass(frozen=True)
class OracleSpec:
    cutoff: int = 40
    dt: float = 1e-3
    params: dict = field(default_factory=dict)


def parse_oracle(value: Any, key: str = "oracle") -> OracleSpec:
    o = _mapping(value, key, {"cutoff", "dt", "params"})
    params = o.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(key + ".params", "expected an object")
    return OracleSpec(
        _int(o.get("cutoff", 40), key + ".cutoff", 2),
        _real(o.get("dt", 1e-3), key + ".dt", positive=True),
        dict(params),
    )


@dataclass(frozen=True)
class RunConfig:
    model: QuadraticModel | None = None
    ordering: OrderingParams | None = None
    ordering_from: OrderingParams | None = None
    ordering_to: OrderingParams | None = None
    state: StateSpec | None = None
    input: Path | None = None
    grid: Geometry | None = None
    time: TimeSpec = TimeSpec()
    output: OutputSpec = OutputSpec()
    oracle: OracleSpec = OracleSpec()
    cap: float = 1e6

    def need(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(name, "missing")


_TOP = {"model", "ordering", "ordering_from", "ordering_to", "state", "input", "grid", "time", "output", "oracle", "cap"}


def parse_config(data: Any) -> RunConfig:
    d = _mapping(data, "config", _TOP)
    kw: dict[str, Any] = {}
    if "model" in d:
        kw["model"] = parse_model(d["model"])
    for k in ("ordering", "ordering_from", "ordering_to"):
        if k in d:
            kw[k] = parse_ordering_key(d[k], k)
    if "state" in d:
        kw["state"] = parse_state(d["state"])
    if "input" in d:
        if not isinstance(d["input"], str):
            raise ConfigError("input", "expected a path string")
        kw["input"] = Path(d["input"])
    if "grid" in d:
        kw["grid"] = parse_grid(d["grid"])
    if "time" in d:
        kw["time"] = parse_time(d["time"])
    if "output" in d:
        kw["output"] = parse_output(d["output"])
    if "oracle" in d:
        kw["oracle"] = parse_oracle(d["oracle"])
    if "cap" in d:
        kw["cap"] = _real(d["cap"], "cap", positive=True)
    return RunConfig(**kw)


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_config(data)
