"""Run configuration: a YAML file with nested key/value sections.

See README.md for the full schema.  Every key is optional except ``m``;
missing keys take the defaults in :data:`DEFAULTS`.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import geometry as geo
from .expr import ExpressionError, parse
from .field import ClassTError, StraightLine, TimeAxis, Worldline, hyperbolic, wiggly


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "seed": 20240917,
    "initial_data": {
        "expression": "bump(t)*(1+0.3*w1)",
        "support": [-1.0, 1.0],
        "partner_expression": "bump(t)*exp(0.4*w1)*cos(t)",
        "partner_support": [-1.0, 1.0],
        "smooth_expression": "exp(0.7*t)*(1+0.3*w1)",
    },
    "worldline": {"kind": "straight_line", "velocity": None},
    "worldlines": None,
    "quadrature": {"sphere": 512, "s_steps": 2000, "loop_steps": 2000, "t_steps": 2000},
    "random": {"samples": 1000, "rapidity": 2.0, "mc_samples": 1000000, "points": 100},
    "transforms": None,
    "tolerances": {},
    "inner_product": {"s_window": None},
    "snapshot": {"x0": 0.0, "grid": None, "mode": "fixed", "directions": None},
    "output": {},
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _float(value, what: str) -> float:
    # YAML 1.1 reads "1e-10" as a string
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what}: expected a number, got {value!r}") from None


def _vector(value, n: int, what: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in value])
    except (TypeError, ValueError):
        raise ConfigError(f"{what}: expected a list of {n} numbers, got {value!r}") from None
    if v.shape != (n,):
        raise ConfigError(f"{what}: expected {n} components, got {v.size}")
    return v


def build_worldline(desc: dict, m: int) -> Worldline:
    """Worldline from a descriptor ``{kind: ..., ...}``."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError(f"worldline descriptor needs a 'kind': {desc!r}")
    kind = desc["kind"]
    try:
        if kind == "time_axis":
            return TimeAxis(m)
        if kind == "straight_line":
            vel = desc.get("velocity")
            if vel is None:
                vel = [0.5] + [0.0] * (m - 1)
            base = desc.get("base")
            return StraightLine(
                _vector(vel, m, "worldline.velocity"),
                None if base is None else _vector(base, m + 1, "worldline.base"),
            )
        if kind == "wiggly":
            return wiggly(
                m,
                _float(desc.get("amplitude", 0.3), "worldline.amplitude"),
                _float(desc.get("frequency", 1.0), "worldline.frequency"),
                int(desc.get("axis", 1)),
            )
        if kind == "hyperbolic":
            wl = hyperbolic(m, _float(desc.get("acceleration", 1.0), "worldline.acceleration"))
            raise ClassTError(
                f"{wl.name} worldline (uniformly accelerated observer) has speed -> 1 "
                "and misses isotropic hyperplanes"
            )
    except ClassTError as exc:
        msg = str(exc)
        if "class T" not in msg:
            msg += " (class T requires a uniform speed bound < 1)"
        raise ConfigError(f"invalid worldline: {msg}") from exc
    raise ConfigError(f"unknown worldline kind {kind!r}")


def build_transform(item: dict, m: int):
    """One chain element -> Lorentz matrix or translation vector."""
    if not isinstance(item, dict) or len(item) != 1:
        raise ConfigError(f"transform must be a single-key mapping, got {item!r}")
    (kind, p), = item.items()
    try:
        if kind == "boost":
            n = _vector(p["direction"], m, "boost.direction")
            norm = np.linalg.norm(n)
            if norm == 0:
                raise ConfigError("boost.direction must be non-zero")
            return geo.boost(n / norm, _float(p["rapidity"], "boost.rapidity"))
        if kind == "rotation":
            return geo.rotation(m, int(p["i"]), int(p["j"]), _float(p["angle"], "rotation.angle"))
        if kind == "translation":
            return _vector(p, m + 1, "translation")
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed {kind} transform: {item!r}") from exc
    except geo.DomainError as exc:
        raise ConfigError(f"invalid {kind} transform: {exc}") from exc
    raise ConfigError(f"unknown transform kind {kind!r}")


@dataclass(frozen=True)
class Snapshot:
    x0: float
    axes: list
    mode: str
    directions: np.ndarray

    def points(self) -> np.ndarray:
        """Spacetime grid points (N, m + 1) at fixed x0, first axis slowest."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        xs = np.stack([g.ravel() for g in mesh], axis=-1)
        return np.concatenate([np.full((xs.shape[0], 1), self.x0), xs], axis=-1)


@dataclass
class RunConfig:
    raw: dict
    m: int
    seed: int
    source: str = "<defaults>"

    @property
    def sha256(self) -> str:
        return hashlib.sha256(json.dumps(self.raw, sort_keys=True).encode()).hexdigest()

    def section(self, name: str):
        return self.raw[name]

    def expression(self, key: str):
        return parse(self.raw["initial_data"][key], self.m)

    def support(self, key: str | None):
        sup = None if key is None else self.raw["initial_data"].get(key)
        if sup is None:
            return None
        lo, hi = (_float(x, f"initial_data.{key}") for x in sup)
        return lo, hi

    def worldline(self) -> Worldline:
        return build_worldline(self.raw["worldline"], self.m)

    def worldlines(self) -> list[Worldline]:
        wls = self.raw.get("worldlines")
        if wls is None:
            return [TimeAxis(self.m), self.worldline()]
        return [build_worldline(d, self.m) for d in wls]

    def transforms(self) -> list:
        chain = self.raw.get("transforms")
        if chain is None:
            n = [1.0] + [0.0] * (self.m - 1)
            chain = [{"boost": {"direction": n, "rapidity": 1.0}}]
            if self.m >= 2:
                chain.append({"rotation": {"i": 1, "j": 2, "angle": 0.7}})
            chain.append({"translation": [0.3] + [0.2 * (k + 1) for k in range(self.m)]})
        return [build_transform(t, self.m) for t in chain]

    def s_window(self):
        win = self.raw["inner_product"].get("s_window")
        if win is None:
            return None
        lo, hi = _vector(win, 2, "inner_product.s_window")
        if not lo < hi:
            raise ConfigError("inner_product.s_window must satisfy lo < hi")
        return float(lo), float(hi)

    def snapshot(self) -> "Snapshot":
        snap = self.raw["snapshot"]
        m = self.m
        mode = snap.get("mode", "fixed")
        if mode not in ("fixed", "intensity"):
            raise ConfigError(f"snapshot.mode must be 'fixed' or 'intensity', got {mode!r}")
        grid = snap.get("grid")
        if grid is None:
            grid = [[-3.0, 3.0, 41]] * m
        if not isinstance(grid, list) or len(grid) != m:
            raise ConfigError(f"snapshot.grid needs one [lo, hi, n] entry per spatial axis ({m})")
        axes = []
        for k, ax in enumerate(grid):
            if not isinstance(ax, (list, tuple)) or len(ax) != 3:
                raise ConfigError(f"snapshot.grid[{k}] must be [lo, hi, n], got {ax!r}")
            lo, hi = _float(ax[0], f"snapshot.grid[{k}]"), _float(ax[1], f"snapshot.grid[{k}]")
            n = ax[2]
            if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                raise ConfigError(f"snapshot.grid[{k}]: point count must be a positive integer, got {n!r}")
            if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo or (n > 1 and hi == lo):
                raise ConfigError(f"snapshot.grid[{k}]: need finite lo < hi, got [{lo}, {hi}]")
            axes.append(np.linspace(lo, hi, n))
        dirs = snap.get("directions")
        if dirs is None:
            dirs = [[1.0] + [0.0] * (m - 1)]
        if not isinstance(dirs, list) or not dirs:
            raise ConfigError("snapshot.directions must be a non-empty list of vectors")
        W = np.array([_vector(d, m, "snapshot.directions") for d in dirs])
        norms = np.linalg.norm(W, axis=1)
        if np.any(norms == 0):
            raise ConfigError("snapshot.directions must be non-zero")
        return Snapshot(_float(snap.get("x0", 0.0), "snapshot.x0"), axes, mode, W / norms[:, None])

    def quad_resolution(self, key: str) -> int:
        return int(self.raw["quadrature"][key])

    def tolerance(self, name: str, default: float, scale: float = 1.0) -> float:
        tols = self.raw.get("tolerances") or {}
        if "all" in tols:
            value = _float(tols["all"], "tolerances.all")
        else:
            value = _float(tols.get(name, default), f"tolerances.{name}")
        return value * scale


def validate(cfg: dict, source: str = "<dict>") -> RunConfig:
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a mapping")
    if "m" not in cfg:
        raise ConfigError("configuration needs 'm' (number of spatial dimensions)")
    m = cfg["m"]
    if m not in (1, 2, 3):
        raise ConfigError(f"m must be 1, 2 or 3, got {m!r}")
    raw = _merge(DEFAULTS, cfg)
    rc = RunConfig(raw, int(m), int(raw["seed"]), source)
    for key in ("expression", "partner_expression", "smooth_expression"):
        try:
            rc.expression(key)
        except ExpressionError as exc:
            raise ConfigError(f"initial_data.{key}: {exc}") from exc
    rc.support("support")
    rc.support("partner_support")
    rc.worldline()
    if raw.get("worldlines") is not None:
        rc.worldlines()
    rc.transforms()
    rc.s_window()
    for name, value in (raw.get("tolerances") or {}).items():
        if _float(value, f"tolerances.{name}") <= 0:
            raise ConfigError(f"tolerances.{name} must be > 0")
    for key in ("sphere", "s_steps", "loop_steps", "t_steps"):
        if int(raw["quadrature"][key]) < 1:
            raise ConfigError(f"quadrature.{key} must be positive")
    for key in ("s_steps", "loop_steps", "t_steps"):
        if int(raw["quadrature"][key]) % 2:
            raise ConfigError(f"quadrature.{key} must be even (composite Simpson)")
    return rc


def load(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return validate(cfg, str(path))


def default_config(m: int) -> RunConfig:
    text = resources.files("kairon").joinpath("configs", f"default_m{m}.yaml").read_text()
    return validate(yaml.safe_load(text), f"default_m{m}.yaml")
