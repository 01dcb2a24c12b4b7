"""Configuration files (YAML or JSON) with dotted or nested keys.

Either give the scaling laws explicitly::

    n: 2
    R: 0.25
    d: {coeff: 0.03125, exp: 2}
    alpha: {coeff: ..., exp: ...}
    beta: {coeff: ..., exp: ...}
    domain: {kind: bounded-rectangle, L_x: 1, d_minus: -1, d_plus: 1}

or ask for the canonical laws realising target limits::

    canonical: {q: 5, r: 1}

Without any scaling-law keys the canonical laws for (q, r) = (5, 1) are used.
"""

from __future__ import annotations

import math

import yaml

from .params import DomainSpec, ModelParams, ScalingLaw, canonical

DEFAULTS = {"n": 2, "R": 0.25, "domain.kind": "bounded-rectangle", "domain.L_x": 1.0,
            "domain.d_minus": -1.0, "domain.d_plus": 1.0, "fem.h_over_eps": 0.125,
            "fem.shell_layers": 2, "bands.phi_count": 33}


class ConfigError(ValueError):
    pass


def flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for key, val in d.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            out.update(flatten(val, name + "."))
        else:
            out[name] = val
    return out


def _number(v):
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", ".inf", "+inf"):
        return math.inf
    return float(v)


def load_config(path: str | None) -> dict:
    if path is None:
        return dict(DEFAULTS)
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    cfg = dict(DEFAULTS)
    cfg.update(flatten(data))
    return cfg


def params_from_config(cfg: dict) -> ModelParams:
    try:
        domain = DomainSpec(cfg["domain.kind"], _number(cfg["domain.L_x"]),
                            _number(cfg["domain.d_minus"]), _number(cfg["domain.d_plus"]))
        n = int(cfg["n"])
        R = _number(cfg["R"])
        explicit = any(k.startswith(("d.", "alpha.", "beta.")) for k in cfg)
        if not explicit and not any(k.startswith("canonical.") for k in cfg):
            cfg = {**cfg, "canonical.q": 5.0, "canonical.r": 1.0}
        if "canonical.q" in cfg or "canonical.r" in cfg:
            kw = {}
            if "canonical.d_coeff" in cfg:
                kw["d_coeff"] = _number(cfg["canonical.d_coeff"])
            if "canonical.d_exp" in cfg:
                kw["d_exp"] = _number(cfg["canonical.d_exp"])
            return canonical(_number(cfg["canonical.q"]), _number(cfg["canonical.r"]), n=n, R=R,
                             domain=domain, **kw)
        laws = {name: ScalingLaw(_number(cfg[f"{name}.coeff"]), _number(cfg[f"{name}.exp"]))
                for name in ("d", "alpha", "beta")}
    except KeyError as exc:
        raise ConfigError(f"missing configuration key {exc.args[0]!r}") from exc
    return ModelParams(R=R, d_law=laws["d"], alpha_law=laws["alpha"], beta_law=laws["beta"],
                       domain=domain, n=n)
