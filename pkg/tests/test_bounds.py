import math

import numpy as np
import pytest

from mcis.bounds import (
    MC_AH,
    SC_AH,
    SC_IS,
    Condition,
    adhoc_aggregate,
    adhoc_per_node_bound,
    average_delay,
    classify_condition,
    delay_asymptotic,
    evaluate_bounds,
    infra_capacity,
    optimal_point,
    per_node_throughput,
    reduce_special_case,
    scah_config,
    scah_hop_limit,
    thresholds,
)
from mcis.model import DomainError, NetworkConfig

LN = math.log


# the three worked classification fixtures
CLASSIFY_CASES = [
    (10**6, 4, 5, 1, 1, Condition.INTERFACE_BOTTLENECK),
    (10**6, 4, 50, 1, 2, Condition.CONNECTIVITY),
    (10**6, 100, 10, 2, 3, Condition.INTERFACE_BOTTLENECK),
]


@pytest.mark.parametrize("n,ca,h,case,sub,cond", CLASSIFY_CASES)
def test_classify_fixtures(n, ca, h, case, sub, cond):
    cls = classify_condition(n, ca, h)
    assert (cls.case, cls.sub_case, cls.condition) == (case, sub, cond)


def test_thresholds_frozen():
    th = thresholds(10**6, 4, 5)
    assert th["F1"] == pytest.approx(13.81551, rel=1e-5)
    assert th["G1"] == pytest.approx(17.36822, rel=1e-5)
    th2 = thresholds(10**6, 100, 10)
    assert th2["F2"] == pytest.approx(74855.51, rel=1e-5)
    assert th2["G2"] == pytest.approx(57.96287, rel=1e-5)


def test_classify_covers_remaining_subcases():
    # case 2 upper branch: H above G2
    cls = classify_condition(10**6, 100, 100)
    assert (cls.case, cls.sub_case, cls.condition) == (2, 4, Condition.INTERFERENCE)
    # case 3: C_A above F2 (tiny n keeps F2 small)
    th = thresholds(100, 1, 2)
    ca3 = int(th["F2"]) + 2
    cls3 = classify_condition(100, ca3, 2)
    assert cls3.case == 3 and cls3.sub_case == 5
    cls6 = classify_condition(100, ca3, 30)  # G3(100) ~ 4.66
    assert cls6.sub_case == 6 and cls6.condition == Condition.DESTINATION_BOTTLENECK


def test_classify_half_open_boundaries():
    # F1(1e6)=13.8155: C_A=13 stays case 1, C_A=14 crosses into case 2
    assert classify_condition(10**6, 13, 5).case == 1
    assert classify_condition(10**6, 14, 5).case == 2


def test_classify_totality_random():
    rng = np.random.default_rng(2)
    for _ in range(300):
        n = int(rng.integers(10, 10**7))
        ca = int(rng.integers(1, 10**4))
        h = int(rng.integers(1, 10**3))
        if h * h * LN(n) <= math.e:
            continue
        cls = classify_condition(n, ca, h)
        assert cls.sub_case in range(1, 7)
        assert cls.condition in Condition


def test_classify_domain_error():
    with pytest.raises(DomainError):
        classify_condition(3, 1, 1)


# frozen by direct evaluation (natural logs, scale=1)
def test_per_node_bounds_frozen():
    assert adhoc_per_node_bound(Condition.INTERFACE_BOTTLENECK, 10, 1, 3, 6.0) == 2.0
    assert adhoc_per_node_bound(
        Condition.CONNECTIVITY, 10**6, 50, 4, 1.0
    ) == pytest.approx(1.047843e-2, rel=1e-5)
    assert adhoc_per_node_bound(
        Condition.INTERFERENCE, 10**6, 50, 4, 1.0
    ) == pytest.approx(7.789500e-2, rel=1e-5)
    assert adhoc_per_node_bound(
        Condition.DESTINATION_BOTTLENECK, 10**6, 50, 4, 1.0
    ) == pytest.approx(8.745942, rel=1e-5)


def test_aggregate_frozen():
    assert adhoc_aggregate(Condition.CONNECTIVITY, 10**6, 50, 4, 1.0) == pytest.approx(
        361.9121, rel=1e-5
    )
    assert adhoc_aggregate(Condition.INTERFERENCE, 10**6, 50, 4, 1.0) == pytest.approx(
        2690.398, rel=1e-5
    )
    assert adhoc_aggregate(
        Condition.DESTINATION_BOTTLENECK, 10**6, 50, 4, 1.0
    ) == pytest.approx(302074.1, rel=1e-4)
    # interface-bottleneck aggregate is H^2 * ln n * W_A / C_A
    for n in (10, 1000, 10**6):
        assert adhoc_aggregate(Condition.INTERFACE_BOTTLENECK, n, 2, 1, 1.0) == pytest.approx(
            4.0 * LN(n)
        )


def test_aggregate_consistent_with_per_node():
    """T_A / lambda_a = H^2 ln^2 n style identity: equals n * P(AH) with
    r^2 = ln n / n, i.e. H^2 ln n, for conditions 1-3."""
    n, h, ca, wa = 10**6, 50, 4, 1.0
    for cond in (
        Condition.CONNECTIVITY,
        Condition.INTERFERENCE,
        Condition.DESTINATION_BOTTLENECK,
    ):
        ratio = adhoc_aggregate(cond, n, h, ca, wa) / adhoc_per_node_bound(cond, n, h, ca, wa)
        assert ratio == pytest.approx(h * h * LN(n), rel=1e-9)


def test_monotonicity_in_h_and_channels():
    for cond in (Condition.CONNECTIVITY, Condition.INTERFERENCE):
        vals_h = [adhoc_per_node_bound(cond, 10**6, h, 4, 1.0) for h in range(2, 40)]
        assert all(a > b for a, b in zip(vals_h, vals_h[1:]))
    vals_c = [adhoc_per_node_bound(Condition.CONNECTIVITY, 10**6, 10, ca, 1.0) for ca in range(1, 30)]
    assert all(a > b for a, b in zip(vals_c, vals_c[1:]))


def test_infra_capacity():
    assert infra_capacity(9, 4, 4, 12.0) == 108.0
    assert infra_capacity(9, 4, 8, 12.0) == 54.0
    assert infra_capacity(9, 4, 0, 0.0) == 0.0
    assert infra_capacity(9, 0, 4, 12.0) == 0.0


def test_infra_capacity_continuous_at_boundary():
    below = infra_capacity(9, 4, 4, 12.0)
    above = infra_capacity(9, 4, 5, 12.0) * 5 / 4  # undo the m/C_I factor step
    assert below == pytest.approx(above)
    # both branches literally agree at C_I = m
    assert infra_capacity(7, 6, 6, 3.0) == pytest.approx(7 * 3.0)


def test_per_node_throughput_infra_dominated():
    cfg = NetworkConfig(
        n=10**4, b=10**4, C=2, C_A=1, C_I=1, m=2, W=2.0, W_A=0.0, W_I=1.0, H=1
    )
    lam = per_node_throughput(Condition.INTERFACE_BOTTLENECK, cfg)
    # W_A=0: lambda = min(b/n, b*m/(n*C_I)) * W_I = W_I
    assert lam == pytest.approx(cfg.W_I)


def test_average_delay_frozen():
    assert average_delay(10**6, 10, 1.0, 4, 4) == pytest.approx(0.2923176, abs=1e-6)
    assert average_delay(10**6, 1, 1.0, 1, 1) == pytest.approx(1.0, abs=1e-4)


def test_average_delay_per_bs_form():
    mixed = average_delay(10**6, 10, 1.0, 4, 4, per_bs_form=True, b=25)
    plain = average_delay(10**6, 10, 1.0, 4, 4)
    assert mixed < plain  # the per-BS variant divides the service term by b


def test_average_delay_errors():
    with pytest.raises(DomainError):
        average_delay(10**6, 10, 1.0, 0, 0)


def test_delay_decomposition_vanishes():
    c = 1.0
    d = average_delay(10**8, 1, c, 4, 4)
    assert abs(d - c / 4) < 1e-3 * c


def test_delay_asymptotic_form():
    assert delay_asymptotic(10**6, 10, 1.0, 4, 4) == pytest.approx(
        1000 * LN(10**6) / 10**6 + 0.25
    )


def test_evaluate_bounds_report(small_cfg):
    rep = evaluate_bounds(small_cfg)
    assert rep.condition in Condition
    assert rep.T_I == infra_capacity(small_cfg.b, small_cfg.m, small_cfg.C_I, small_cfg.W_I)
    assert rep.lam > 0 and rep.D > 0


def test_scah_reduction_identity():
    for n in (10**4, 10**5, 10**6):
        red = reduce_special_case(SC_AH, n, W=1.0)
        assert red.ratio == pytest.approx(1.0, rel=1e-12)
    red6 = reduce_special_case(SC_AH, 10**6, W=1.0)
    assert red6.reference == pytest.approx(2.6904e-4, rel=1e-4)


def test_scah_config_shape():
    cfg = scah_config(10**4, W=1.0)
    assert (cfg.C_A, cfg.C_I, cfg.W_A, cfg.W_I) == (1, 0, 1.0, 0.0)
    assert cfg.H == scah_hop_limit(10**4) == 33


def test_mcah_reduction_scales_with_channels():
    base = reduce_special_case(SC_AH, 10**5, W=1.0)
    multi = reduce_special_case(MC_AH, 10**5, W=1.0, C=8)
    assert multi.reduced == pytest.approx(base.reduced / 8)
    assert multi.ratio == pytest.approx(1.0, rel=1e-12)


def test_scis_reduction_orders():
    red = reduce_special_case(SC_IS, 10**6, W=2.0, c=1.0)
    assert red.ratio == pytest.approx(1.0, rel=1e-12)
    assert red.delay_reduced == pytest.approx(red.delay_reference, rel=1e-3)  # Theta(c)
    assert red.config.W_A == 0.0 and red.config.W_I == 1.0


def test_optimal_point_branches():
    lam, d = optimal_point("infra", None, n=1000, b=1000, C=4, m=4, H=1, W=3.0, c=1.0, C_I=4)
    assert lam == pytest.approx(3.0) and d == pytest.approx(0.25)
    lam2, d2 = optimal_point("infra", None, n=1000, b=100, C=4, m=4, H=1, W=3.0, c=1.0, C_I=4)
    assert lam2 == pytest.approx(0.3)
    lam3, d3 = optimal_point(
        "adhoc", Condition.CONNECTIVITY, n=10**6, b=1, C=4, m=0, H=50, W=1.0, c=1.0
    )
    assert lam3 == pytest.approx(361.9121 / 10**6, rel=1e-5)
    assert d3 == 50.0
