"""Network configuration and the structural constraints every other module relies on.

Symbols follow the usual capacity-scaling notation: n nodes, b = b0^2 base
stations, C = C_A + C_I channels, W = W_A + 2*W_I bandwidth, H max ad-hoc
hops, guard zone delta, transmission range r.  All logarithms in this
package are natural logs; asymptotic constants are absorbed into a single
``threshold_scale`` knob so that ratio/slope checks stay constant-free.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace


class ConfigError(ValueError):
    """A network configuration violates a structural constraint."""


class ChannelSplitError(ConfigError):
    """C != C_A + C_I."""


class BandwidthSplitError(ConfigError):
    """W != W_A + 2*W_I."""


class InterfaceCountError(ConfigError):
    """Base-station interface count must be even (and >= 2 when W_I > 0)."""


class BaseStationCountError(ConfigError):
    """b must be the square of a positive integer."""


class GuardZoneError(ConfigError):
    """Guard zone delta must be positive."""


class DomainError(ValueError):
    """A formula was evaluated outside its valid parameter domain."""


# Tolerance for the real-valued bandwidth identity W = W_A + 2*W_I.
_SPLIT_TOL = 1e-12


@dataclass(frozen=True)
class NetworkConfig:
    """Immutable parameter set for one MC-IS network instance.

    ``r=None`` asks the simulator to derive a range automatically (the
    connectivity radius, raised to the cell-adjacency floor used by the
    constructive routing scheme).  ``W_I=0`` disables infrastructure mode.
    """

    n: int = 100
    b: int = 4
    C: int = 2
    C_A: int = 1
    C_I: int = 1
    m: int = 2
    W: float = 2.0
    W_A: float = 1.0
    W_I: float = 0.5
    H: int = 2
    delta: float = 1.0
    r: float | None = None
    seed: int = 0
    c_service: float = 1.0

    @property
    def b0(self) -> int:
        return math.isqrt(self.b)

    @property
    def infrastructure_enabled(self) -> bool:
        return self.W_I > 0.0

    def with_overrides(self, **kw) -> "NetworkConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class BoundsConstants:
    """Guard-zone derived constants plus the knobs for evaluating Theta-forms.

    k5 bounds interfering ad-hoc cells, k8 interfering BS-cells; both are
    4*(1+delta)^2.  threshold_scale multiplies every evaluated asymptotic
    expression (default 1), margin scales the connectivity radius.
    """

    delta: float = 1.0
    threshold_scale: float = 1.0
    margin: float = 1.0
    k5: float = field(init=False, default=0.0)
    k8: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.delta <= 0:
            raise GuardZoneError(f"delta must be > 0, got {self.delta}")
        if self.threshold_scale <= 0:
            raise ConfigError(f"threshold_scale must be > 0, got {self.threshold_scale}")
        k = 4.0 * (1.0 + self.delta) ** 2
        object.__setattr__(self, "k5", k)
        object.__setattr__(self, "k8", k)


def validate_config(cfg: NetworkConfig) -> NetworkConfig:
    """Check every structural invariant; return the config unchanged if valid.

    Raises a distinct ConfigError subclass per violated constraint so callers
    can report the exact failure.
    """
    if cfg.n < 2:
        raise ConfigError(f"need n >= 2 nodes, got {cfg.n}")
    if cfg.H < 1:
        raise ConfigError(f"need H >= 1, got {cfg.H}")
    if cfg.delta <= 0:
        raise GuardZoneError(f"delta must be > 0, got {cfg.delta}")
    if cfg.C_A < 1:
        raise ChannelSplitError(f"need C_A >= 1 ad-hoc channels, got {cfg.C_A}")
    if cfg.C_I < 0:
        raise ChannelSplitError(f"C_I must be >= 0, got {cfg.C_I}")
    if cfg.C != cfg.C_A + cfg.C_I:
        raise ChannelSplitError(f"channel split violated: C={cfg.C} != C_A+C_I={cfg.C_A + cfg.C_I}")
    if min(cfg.W, cfg.W_A, cfg.W_I) < 0:
        raise BandwidthSplitError("bandwidths must be nonnegative")
    if abs(cfg.W - (cfg.W_A + 2.0 * cfg.W_I)) > _SPLIT_TOL * max(1.0, cfg.W):
        raise BandwidthSplitError(
            f"bandwidth split violated: W={cfg.W} != W_A+2*W_I={cfg.W_A + 2.0 * cfg.W_I}"
        )
    if cfg.m < 0 or cfg.m % 2 != 0:
        raise InterfaceCountError(f"m must be an even number, got {cfg.m}")
    if cfg.b < 1 or math.isqrt(cfg.b) ** 2 != cfg.b:
        raise BaseStationCountError(f"b must be a perfect square >= 1, got {cfg.b}")
    if cfg.infrastructure_enabled:
        if cfg.m < 2:
            raise InterfaceCountError("infrastructure enabled (W_I > 0) needs m >= 2 interfaces")
        if cfg.C_I < 1:
            raise ChannelSplitError("infrastructure enabled (W_I > 0) needs C_I >= 1")
    if cfg.r is not None:
        if not 0.0 < cfg.r <= math.sqrt(2.0):
            raise ConfigError(f"transmission range r must lie in (0, sqrt(2)], got {cfg.r}")
    if cfg.c_service <= 0:
        raise ConfigError(f"c_service must be > 0, got {cfg.c_service}")
    return cfg


def connectivity_radius(n: int, margin: float = 1.0) -> float:
    """Smallest transmission range keeping the random network connected w.h.p.

    Returns margin * sqrt(ln n / (pi n)).  The underlying threshold is a
    strict inequality, so margin must be positive.
    """
    if n < 2:
        raise DomainError(f"connectivity radius needs n >= 2, got {n}")
    if margin <= 0:
        raise DomainError("margin must be > 0: the radius must exceed the threshold")
    return margin * math.sqrt(math.log(n) / (math.pi * n))


# --- flat key=value config files -------------------------------------------

_INT_KEYS = {"n", "b", "C", "C_A", "C_I", "m", "H", "seed"}
_FLOAT_KEYS = {"W", "W_A", "W_I", "delta", "r", "c_service"}
CONFIG_KEYS = _INT_KEYS | _FLOAT_KEYS


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines (# comments allowed) into typed overrides."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key == "r" and val.lower() in ("auto", "none", ""):
                values[key] = None
            else:
                values[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    return values


def load_config(path: str | os.PathLike, overrides: dict | None = None) -> NetworkConfig:
    """Build a validated config from a file plus optional flag overrides."""
    with open(path, "r", encoding="utf-8") as fh:
        values = parse_config_text(fh.read())
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(NetworkConfig(**values))
