"""Flat ``key = value`` run configuration.

Every numeric default mirrors the reference experiments (n=100, lambda=1,
tol=1e-7).  Keys are range-checked before any compute happens, unknown or
out-of-place keys are rejected with a message naming the key, and the fully
resolved configuration can be rendered as stable comment lines so every
output CSV embeds the settings that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

__all__ = ["UsageError", "RunConfig", "parse_config_file", "build_config"]


class UsageError(ValueError):
    """Configuration or invocation problem; maps to exit code 1."""


@dataclass
class RunConfig:
    n: int = 100
    lam: float = 1.0
    tol: float = 1e-7
    max_iter: int = 5000
    eta: float = 1e-8
    delta: float = 0.0
    deltas: tuple[float, ...] = (0.01, 0.035, 0.06)
    seeds: tuple[int, ...] = tuple(range(10))
    param: str = "a"
    epsilons: tuple[float, ...] = (0.04, 0.02, 0.01, 0.005)
    mode: str = "constant-shift"
    problem: str = "example1"
    a_file: str | None = None
    f_file: str | None = None
    h_file: str | None = None
    u_file: str | None = None


# config-file key -> RunConfig attribute
_KEY_TO_ATTR = {
    "n": "n",
    "lambda": "lam",
    "tol": "tol",
    "max_iter": "max_iter",
    "eta": "eta",
    "delta": "delta",
    "deltas": "deltas",
    "seeds": "seeds",
    "param": "param",
    "epsilons": "epsilons",
    "mode": "mode",
    "problem": "problem",
    "a_file": "a_file",
    "f_file": "f_file",
    "h_file": "h_file",
    "u_file": "u_file",
}

_PROBLEM_KEYS = ("problem", "a_file", "f_file", "h_file")

ALLOWED_KEYS = {
    "solve": ("n", "lambda", "tol", "max_iter", "eta", "delta", "seeds") + _PROBLEM_KEYS,
    "certify": ("n", "eta", "u_file") + _PROBLEM_KEYS,
    "sweep": ("n", "lambda", "tol", "max_iter", "eta", "param", "epsilons", "mode", "seeds")
    + _PROBLEM_KEYS,
    "table1": ("n", "lambda", "tol", "max_iter", "deltas", "seeds", "problem"),
    "contour": ("n", "u_file") + _PROBLEM_KEYS,
    "plotdata": tuple(_KEY_TO_ATTR),
}


def parse_config_file(path) -> dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment, blank lines ignored."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in raw:
            raise UsageError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"key {key!r} needs an integer, got {value!r}") from None


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise UsageError(f"key {key!r} needs a number, got {value!r}") from None


def _parse_list(key: str, value: str, item_parser) -> tuple:
    items = [tok.strip() for tok in value.split(",") if tok.strip()]
    if not items:
        raise UsageError(f"key {key!r} needs a non-empty comma-separated list")
    return tuple(item_parser(key, tok) for tok in items)


def build_config(raw: dict[str, str], command: str) -> RunConfig:
    """Turn raw key/value strings into a validated RunConfig for one command."""
    allowed = ALLOWED_KEYS[command]
    for key in raw:
        if key not in _KEY_TO_ATTR:
            raise UsageError(f"unknown config key {key!r}")
        if key not in allowed:
            raise UsageError(f"config key {key!r} is not used by '{command}'")

    cfg = RunConfig()
    for key, value in raw.items():
        attr = _KEY_TO_ATTR[key]
        if key in ("n", "max_iter"):
            setattr(cfg, attr, _parse_int(key, value))
        elif key in ("lambda", "tol", "eta", "delta"):
            setattr(cfg, attr, _parse_float(key, value))
        elif key in ("deltas", "epsilons"):
            setattr(cfg, attr, _parse_list(key, value, _parse_float))
        elif key == "seeds":
            setattr(cfg, attr, _parse_list(key, value, _parse_int))
        else:
            setattr(cfg, attr, value)

    _range_checks(cfg, command)
    return cfg


def _range_checks(cfg: RunConfig, command: str) -> None:
    if cfg.n < 2:
        raise UsageError("key 'n' must be at least 2")
    if cfg.lam <= 0:
        raise UsageError("key 'lambda' must be positive")
    if cfg.tol <= 0:
        raise UsageError("key 'tol' must be positive")
    if cfg.max_iter < 0:
        raise UsageError("key 'max_iter' must be nonnegative")
    if cfg.eta <= 0:
        raise UsageError("key 'eta' must be positive")
    if cfg.delta < 0:
        raise UsageError("key 'delta' must be nonnegative")
    if any(d < 0 for d in cfg.deltas):
        raise UsageError("key 'deltas' must be nonnegative")
    if any(s < 0 for s in cfg.seeds):
        raise UsageError("key 'seeds' must be nonnegative integers")
    if cfg.param not in ("a", "f", "H", "combined"):
        raise UsageError("key 'param' must be one of a, f, H, combined")
    if cfg.mode not in ("constant-shift", "smooth-bump", "noise"):
        raise UsageError("key 'mode' must be one of constant-shift, smooth-bump, noise")
    if cfg.problem not in ("example1", "files"):
        raise UsageError("key 'problem' must be example1 or files")
    if any(e < 0 for e in cfg.epsilons):
        raise UsageError("key 'epsilons' must be nonnegative")
    if any(
        cfg.epsilons[i] <= cfg.epsilons[i + 1] for i in range(len(cfg.epsilons) - 1)
    ):
        raise UsageError("key 'epsilons' must be strictly decreasing")
    if command == "table1" and cfg.problem != "example1":
        raise UsageError("table1 runs on the built-in example1 instance only")
    if cfg.problem == "files":
        if cfg.a_file is None or cfg.h_file is None:
            raise UsageError("problem = files needs at least a_file and h_file")
    if command == "solve" and cfg.delta > 0 and len(cfg.seeds) != 1:
        raise UsageError("solve with delta > 0 needs exactly one entry in 'seeds'")


def resolved_lines(cfg: RunConfig, command: str) -> list[str]:
    """Render the effective configuration as stable 'key = value' lines."""
    out = [f"command = {command}"]
    attr_to_key = {v: k for k, v in _KEY_TO_ATTR.items()}
    for f in fields(RunConfig):
        key = attr_to_key[f.name]
        if key not in ALLOWED_KEYS[command]:
            continue
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            rendered = ", ".join(_fmt(v) for v in value)
        else:
            rendered = _fmt(value)
        out.append(f"{key} = {rendered}")
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)
