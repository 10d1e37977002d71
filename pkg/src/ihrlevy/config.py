"""Key-value configuration files.

One ``key = value`` per line; ``#`` starts a comment; dotted keys such as
``study.d`` group settings.  Values are Python literals (numbers, lists,
tuples, strings); anything that is not a literal is kept as a string.

Process keys: ``d``, ``gamma`` (matrix CSV path), ``psi`` (path to an
``i j value`` list, or an inline list of ``(i, j, value)`` triples with
1-based indices), ``alpha``, ``c_plus``, ``c_minus``, ``tau``, ``epsilon``,
``delta``, ``n``, ``seed``.

Study keys (prefix ``study.``): ``d``, ``a``, ``theta_range``,
``psi_regime``, ``psi_range``, ``alpha``, ``c_plus``, ``c_minus``,
``n_list``, ``delta``, ``eps``, ``q_exponent``, ``k_exponent``,
``replications``, ``seed``, ``methods``, ``fit_psi``, ``v``.
"""

import ast
from dataclasses import fields
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidConfig, InvalidSpec
from .hr import HRParams
from .ising import IsingModel
from .io import read_matrix, read_psi
from .levy import DEFAULT_EPS, ProcessSpec
from .study import StudyConfig

PROCESS_KEYS = ("d", "gamma", "psi", "alpha", "c_plus", "c_minus", "tau", "epsilon", "delta", "n", "seed")


def parse_config(text):
    out = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {ln}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if not key:
            raise InvalidConfig(f"line {ln}: empty key")
        try:
            val = ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            val = raw
        out[key] = val
    return out


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from None
    cfg = parse_config(text)
    cfg["_base"] = str(Path(path).resolve().parent)
    return cfg


def _path(cfg, p):
    p = Path(p)
    return p if p.is_absolute() else Path(cfg.get("_base", ".")) / p


def process_spec_from(cfg):
    """Build a :class:`ProcessSpec` plus simulation settings from a parsed config."""
    unknown = [k for k in cfg if not k.startswith("_") and "." not in k and k not in PROCESS_KEYS]
    if unknown:
        raise InvalidConfig(f"unknown keys: {', '.join(sorted(unknown))}")
    if "gamma" not in cfg:
        raise InvalidConfig("missing key 'gamma'")
    try:
        g = cfg["gamma"]
        gamma = np.array(g, dtype=float) if isinstance(g, (list, tuple)) else read_matrix(_path(cfg, g))
    except (OSError, ValueError) as exc:
        raise InvalidConfig(f"cannot load gamma: {exc}") from None
    d = int(cfg.get("d", gamma.shape[0]))
    if gamma.shape != (d, d):
        raise InvalidSpec(f"gamma has shape {gamma.shape}, expected ({d}, {d})")
    hr = HRParams(gamma)
    psi = cfg.get("psi")
    ising = None
    if psi is not None:
        if isinstance(psi, (list, tuple)):
            vals = {}
            for t in psi:
                i, j, v = int(t[0]), int(t[1]), float(t[2])
                if not (1 <= i <= d and 1 <= j <= d) or i == j:
                    raise InvalidSpec(f"invalid psi edge ({i}, {j})")
                vals[(min(i, j) - 1, max(i, j) - 1)] = v
        else:
            vals = read_psi(_path(cfg, psi), d)
        ising = IsingModel.from_edges(d, vals)
    try:
        spec = ProcessSpec(hr, cfg.get("alpha", 1.5), cfg.get("c_plus", 1.0), cfg.get("c_minus", 1.0),
                           cfg.get("tau", 0.0), ising=ising)
    except (ValueError, TypeError) as exc:
        raise InvalidSpec(str(exc)) from None
    sim = {
        "n": int(cfg.get("n", 1000)),
        "delta": float(cfg.get("delta", 1.0)),
        "eps": float(cfg.get("epsilon", DEFAULT_EPS)),
        "seed": int(cfg.get("seed", 0)),
    }
    return spec, sim


def study_config_from(cfg):
    names = {f.name for f in fields(StudyConfig)}
    kw = {}
    for key, val in cfg.items():
        if key.startswith("_"):
            continue
        name = key[len("study."):] if key.startswith("study.") else key
        if name not in names:
            raise InvalidConfig(f"unknown study key {key!r}")
        kw[name] = val
    try:
        return StudyConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(str(exc)) from None
