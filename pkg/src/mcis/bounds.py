"""Closed-form capacity and delay bounds, regime classification, and reductions.

Every Theta/O/Omega expression is evaluated as an exact formula with natural
logs and a single multiplicative ``scale`` (default 1) standing in for the
unspecified asymptotic constants; consumers are expected to compare ratios
and slopes, which are scale-invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .model import DomainError, NetworkConfig

LN = math.log
PI = math.pi


class Condition(str, Enum):
    CONNECTIVITY = "connectivity"
    INTERFERENCE = "interference"
    DESTINATION_BOTTLENECK = "destination-bottleneck"
    INTERFACE_BOTTLENECK = "interface-bottleneck"


# Sub-case -> dominating requirement (2/4/6 are the upper sub-cases).
SUBCASE_CONDITION = {
    1: Condition.INTERFACE_BOTTLENECK,
    2: Condition.CONNECTIVITY,
    3: Condition.INTERFACE_BOTTLENECK,
    4: Condition.INTERFERENCE,
    5: Condition.INTERFACE_BOTTLENECK,
    6: Condition.DESTINATION_BOTTLENECK,
}


def _check_domain(n: int, H: int) -> float:
    """Returns H^2*ln n, the nested-log argument shared by F2, a(n) and the
    destination-bottleneck bound."""
    if n < 3 or H < 1:
        raise DomainError(f"need n >= 3 and H >= 1, got {(n, H)}")
    x = H * H * LN(n)
    if x <= math.e:
        raise DomainError(f"H^2*ln(n) = {x:.4f} <= e: nested log undefined")
    return x


def thresholds(n: int, C_A: int, H: int) -> dict:
    """The channel thresholds F1/F2 and hop thresholds G1/G2/G3."""
    x = _check_domain(n, H)
    ln_n = LN(n)
    return {
        "F1": ln_n,
        "F2": n * (LN(LN(x)) / LN(x)) ** 2,
        "G1": n ** (1 / 3) / ln_n ** (2 / 3),
        "G2": n ** (1 / 3) * C_A ** (1 / 6) / ln_n**0.5,
        "G3": n**0.5 / ln_n**0.5,
    }


@dataclass(frozen=True)
class Classification:
    case: int         # 1..3 from C_A vs F1/F2
    sub_case: int     # 1..6
    condition: Condition
    thresholds: dict


def classify_condition(n: int, C_A: int, H: int) -> Classification:
    """Map (n, C_A, H) to its dominating requirement.

    Boundaries are half-open toward the lower-indexed case: case 1 while
    C_A <= F1, case 3 once C_A > F2; the lower sub-case while H < G_i.
    """
    if C_A < 1:
        raise DomainError(f"need C_A >= 1, got {C_A}")
    th = thresholds(n, C_A, H)
    if C_A <= th["F1"]:
        case = 1
        sub = 1 if H < th["G1"] else 2
    elif C_A <= th["F2"]:
        case = 2
        sub = 3 if H < th["G2"] else 4
    else:
        case = 3
        sub = 5 if H < th["G3"] else 6
    return Classification(case=case, sub_case=sub, condition=SUBCASE_CONDITION[sub], thresholds=th)


def adhoc_per_node_bound(
    cond: Condition, n: int, H: int, C_A: int, W_A: float, scale: float = 1.0
) -> float:
    """Per-node ad-hoc throughput bound lambda_a under the given condition."""
    ln_n = LN(n)
    if cond is Condition.CONNECTIVITY:
        val = n * W_A / (H**3 * ln_n**2 * C_A)
    elif cond is Condition.INTERFERENCE:
        val = n * W_A / (math.sqrt(C_A) * H**3 * ln_n**1.5)
    elif cond is Condition.DESTINATION_BOTTLENECK:
        x = _check_domain(n, H)
        val = n**1.5 * LN(LN(x)) * W_A / (C_A * H**3 * ln_n**1.5 * LN(x))
    elif cond is Condition.INTERFACE_BOTTLENECK:
        val = W_A / C_A
    else:
        raise DomainError(f"unknown condition {cond}")
    return scale * val


def adhoc_aggregate(
    cond: Condition, n: int, H: int, C_A: int, W_A: float, scale: float = 1.0
) -> float:
    """Aggregate ad-hoc throughput T_A under the given condition."""
    ln_n = LN(n)
    if cond is Condition.CONNECTIVITY:
        val = n * W_A / (H * ln_n * C_A)
    elif cond is Condition.INTERFERENCE:
        val = n * W_A / (math.sqrt(C_A) * H * ln_n**0.5)
    elif cond is Condition.DESTINATION_BOTTLENECK:
        x = _check_domain(n, H)
        val = n**1.5 * LN(LN(x)) * W_A / (C_A * H * ln_n**0.5 * LN(x))
    elif cond is Condition.INTERFACE_BOTTLENECK:
        val = H * H * ln_n * W_A / C_A
    else:
        raise DomainError(f"unknown condition {cond}")
    return scale * val


def infra_capacity(b: int, m: int, C_I: int, W_I: float, scale: float = 1.0) -> float:
    """Aggregate infrastructure throughput T_I: b*W_I, or b*(m/C_I)*W_I when
    interfaces are scarce (C_I > m)."""
    if b < 1 or W_I < 0 or C_I < 0 or m < 0:
        raise DomainError(f"bad infrastructure parameters {(b, m, C_I, W_I)}")
    if W_I == 0 or m == 0:
        return 0.0
    if C_I <= m:
        return scale * b * W_I
    return scale * b * (m / C_I) * W_I


def per_node_throughput(cond: Condition, cfg: NetworkConfig, scale: float = 1.0) -> float:
    """Per-node throughput lambda = T_A/n + min(b/n, b*m/(n*C_I))*W_I."""
    adhoc = adhoc_aggregate(cond, cfg.n, cfg.H, cfg.C_A, cfg.W_A, scale) / cfg.n
    if cfg.W_I == 0:
        return adhoc
    if min(cfg.C_I, cfg.m) == 0:
        raise DomainError("W_I > 0 requires C_I >= 1 and m >= 1")
    infra = min(cfg.b / cfg.n, cfg.b * cfg.m / (cfg.n * cfg.C_I)) * cfg.W_I
    return adhoc + scale * infra


def average_delay(
    n: int,
    H: int,
    c: float,
    C_I: int,
    m: int,
    scale: float = 1.0,
    per_bs_form: bool = False,
    b: int = 1,
) -> float:
    """Packet-averaged delay: ad-hoc packets cost H, infrastructure packets
    cost c/min(C_I, m) each, mixed by the ad-hoc transmitter count
    pi*H^2*ln n.

    ``per_bs_form`` switches the infrastructure term to c/(b*min(C_I, m)),
    the alternative stated alongside the main result; the default follows
    the packet-mixture form.
    """
    if n < 3 or H < 1 or c <= 0:
        raise DomainError(f"need n >= 3, H >= 1, c > 0, got {(n, H, c)}")
    adhoc_sources = min(PI * H * H * LN(n), float(n))
    infra_sources = n - adhoc_sources
    k = min(C_I, m)
    if infra_sources > 0 and k < 1:
        raise DomainError("infrastructure packets present but min(C_I, m) = 0")
    infra_each = 0.0 if infra_sources == 0 else c / (b * k) if per_bs_form else c / k
    return scale * (adhoc_sources * H + infra_sources * infra_each) / n


def delay_asymptotic(n: int, H: int, c: float, C_I: int, m: int, scale: float = 1.0) -> float:
    """The compact delay form H^3*ln n/n + c/min(C_I, m)."""
    if min(C_I, m) < 1:
        raise DomainError("delay form needs min(C_I, m) >= 1")
    return scale * (H**3 * LN(n) / n + c / min(C_I, m))


@dataclass(frozen=True)
class BoundsReport:
    condition: Condition
    case: int
    sub_case: int
    lambda_a: float
    T_A: float
    T_I: float
    lam: float
    D: float
    thresholds: dict


def evaluate_bounds(cfg: NetworkConfig, scale: float = 1.0) -> BoundsReport:
    """Classify the config and evaluate every closed-form bound for it."""
    cls = classify_condition(cfg.n, cfg.C_A, cfg.H)
    cond = cls.condition
    return BoundsReport(
        condition=cond,
        case=cls.case,
        sub_case=cls.sub_case,
        lambda_a=adhoc_per_node_bound(cond, cfg.n, cfg.H, cfg.C_A, cfg.W_A, scale),
        T_A=adhoc_aggregate(cond, cfg.n, cfg.H, cfg.C_A, cfg.W_A, scale),
        T_I=infra_capacity(cfg.b, cfg.m, cfg.C_I, cfg.W_I, scale),
        lam=per_node_throughput(cond, cfg, scale),
        D=average_delay(cfg.n, cfg.H, cfg.c_service, cfg.C_I, cfg.m, scale)
        if (cfg.W_I > 0 or PI * cfg.H**2 * LN(cfg.n) >= cfg.n)
        else math.nan,
        thresholds=cls.thresholds,
    )


# --- special-case reductions -------------------------------------------------

SC_AH = "scah"
MC_AH = "mcah"
SC_IS = "scis"


@dataclass(frozen=True)
class Reduction:
    kind: str
    config: NetworkConfig
    reference: float    # the target network's known bound
    reduced: float      # our formula evaluated at the reducing configuration
    delay_reference: float
    delay_reduced: float

    @property
    def ratio(self) -> float:
        return self.reduced / self.reference


def scah_hop_limit(n: int) -> int:
    """The hop ceiling ceil(sqrt(n/ln n)) that turns H-max-hop routing into
    pure multi-hop ad hoc."""
    return math.ceil(math.sqrt(n / LN(n)))


def scah_config(n: int, W: float, seed: int = 0, delta: float = 1.0) -> NetworkConfig:
    """Single-channel pure ad-hoc configuration (all bandwidth to W_A)."""
    return NetworkConfig(
        n=n, b=1, C=1, C_A=1, C_I=0, m=0,
        W=W, W_A=W, W_I=0.0, H=scah_hop_limit(n), delta=delta, seed=seed,
    )


def reduce_special_case(kind: str, n: int, W: float, C: int = 1, c: float = 1.0) -> Reduction:
    """Evaluate the bound formulas at a baseline network's configuration and
    pair them with that baseline's known optimal orders.

    The capacity identities use the exact real hop limit sqrt(n/ln n), so
    the SC-AH ratio is 1 by algebra, not asymptotics.
    """
    ln_n = LN(n)
    if kind == SC_AH:
        h_real = math.sqrt(n / ln_n)
        reduced = n * W / (h_real**3 * ln_n**2 * 1)
        reference = W / math.sqrt(n * ln_n)
        cfg = scah_config(n, W)
        d_ref = c * math.sqrt(n / ln_n)
        d_red = c * h_real
        return Reduction(kind, cfg, reference, reduced, d_ref, d_red)
    if kind == MC_AH:
        h_real = math.sqrt(n / ln_n)
        reduced = n * W / (h_real**3 * ln_n**2 * C)
        reference = W / (C * math.sqrt(n * ln_n))
        cfg = NetworkConfig(
            n=n, b=1, C=C, C_A=C, C_I=0, m=0,
            W=W, W_A=W, W_I=0.0, H=scah_hop_limit(n), delta=1.0,
        )
        d_ref = c * math.sqrt(n / ln_n)
        d_red = c * h_real
        return Reduction(kind, cfg, reference, reduced, d_ref, d_red)
    if kind == SC_IS:
        # All bandwidth to the infrastructure (W_A=0, W_I=W/2), b ~ n BS.
        b0 = math.isqrt(n)
        cfg = NetworkConfig(
            n=n, b=b0 * b0, C=2, C_A=1, C_I=1, m=2,
            W=W, W_A=0.0, W_I=W / 2, H=1, delta=1.0, c_service=c,
        )
        reduced = min(cfg.b / n, cfg.b * cfg.m / (n * cfg.C_I)) * cfg.W_I
        reference = (b0 * b0 / n) * W / 2  # per-BS-density Theta(W) target, W_I=W/2 split
        d_red = average_delay(n, cfg.H, c, cfg.C_I, cfg.m)
        d_ref = c
        return Reduction(kind, cfg, reference, reduced, d_ref, d_red)
    raise DomainError(f"unknown special case {kind!r}")


def optimal_point(
    dominant: str, cond: Condition | None, n: int, b: int, C: int, m: int, H: int,
    W: float, c: float, C_I: int | None = None, scale: float = 1.0,
) -> tuple[float, float]:
    """(lambda_max, delay) at the optimal operating split.

    dominant="infra": all bandwidth to infrastructure (W_A=0, W_I=W/2);
    throughput min(b/n, 1)*W with delay c/min(C_I, m).  dominant="adhoc":
    all bandwidth ad hoc (W_A=W over C channels) with delay H.
    """
    if dominant == "infra":
        k = min(C_I if C_I is not None else C, m)
        if k < 1:
            raise DomainError("infrastructure optimum needs min(C_I, m) >= 1")
        lam = scale * min(b / n, 1.0) * W
        return lam, scale * c / k
    if dominant == "adhoc":
        if cond is None:
            raise DomainError("ad-hoc optimum needs a condition")
        lam = adhoc_aggregate(cond, n, H, C, W, scale) / n
        return lam, scale * c * H
    raise DomainError(f"dominant must be 'infra' or 'adhoc', got {dominant!r}")
