import math

import numpy as np
import pytest

from ifnet.expr import FactorizationLaw, MITerm, RateExpression
from ifnet.gaussian import (PROP4_PARAM, PROP5_PARAM, GaussianNetwork, GaussianParameterization,
                            check_rank_one_degraded, evaluate_gaussian_expr, layered_gains, cross_gains,
                            gaussian_cmi, maximize_box, prop4_capacity, prop4_objective, prop5_capacity,
                            prop5_objective, psi, sweep_csv, sweep_prop5)
from ifnet.model import GaussianChannel, make_spec, msg
from ifnet.sumrate import sumrate_expression
from netgen import LAYERED17


def test_psi_values():
    assert psi(0) == 0
    assert psi(1) == pytest.approx(0.5)
    assert psi(3) == pytest.approx(1.0)
    assert psi(15) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        psi(-1)


def test_cmi_scalar_channel():
    P = 7.0
    assert gaussian_cmi([[math.sqrt(P), 0]], [[math.sqrt(P), 1]]) == pytest.approx(psi(P))
    x, y = [math.sqrt(P), 0], [math.sqrt(P), 1]
    assert gaussian_cmi([x], [y], [x]) == pytest.approx(0, abs=1e-9)
    assert gaussian_cmi([], [y]) == 0


def test_rank_one_examples():
    c = check_rank_one_degraded([[2, 4], [1, 2]])
    assert c.order == (1, 2) and c.ratios == pytest.approx((2,)) and c.signs == (1,)
    assert check_rank_one_degraded(np.eye(2)) is None
    a = np.array([1.0, 0.5, -0.3, 2.0])
    c = check_rank_one_degraded([a, a / 2, a / 4])
    assert c.order == (1, 2, 3) and c.ratios == pytest.approx((2, 2))
    c = check_rank_one_degraded([[1, 2], [2, 4]])
    assert c.order == (2, 1)
    c = check_rank_one_degraded([[2, 4], [-1, -2]])
    assert c.signs == (-1,) and c.ratios == pytest.approx((2,))
    assert check_rank_one_degraded([[3.0, 1.0]]).order == (1,)
    with pytest.raises(ValueError):
        check_rank_one_degraded([[0, 0], [1, 2]])


def test_rank_one_mixing_weights():
    c = check_rank_one_degraded(layered_gains([1, 1, 1, 1], 1.5, 2))
    assert c.ratios == pytest.approx((1.5, 2))
    for w, s in c.mixing:
        assert w * w + s * s == pytest.approx(1)


def single_param():
    def build(values, net):
        return {msg("1", "1"): [1]}, [[math.sqrt(net.powers[0])]], 1
    return GaussianParameterization("p2p", (), (), build)


def test_point_to_point_evaluation():
    spec = make_spec(1, 1, [msg("1", "1")])
    e = sumrate_expression(spec)
    net = GaussianNetwork(np.array([[2.0]]), np.array([3.0]))
    assert evaluate_gaussian_expr(e, single_param(), {}, net) == pytest.approx(psi(12.0))
    net = GaussianNetwork(np.array([[1.0]]), np.array([1.0]))
    assert evaluate_gaussian_expr(e, single_param(), {}, net) == pytest.approx(0.5)


def prop4_setup(a=(1.0, 0.7, 1.2, 0.9), b2=1.5, b3=2.0, P=(1.0, 2.0, 1.5, 3.0)):
    spec = make_spec(4, 3, LAYERED17)
    net = GaussianNetwork(layered_gains(a, b2, b3), np.array(P))
    return sumrate_expression(spec), net


@pytest.mark.parametrize("al,be", [(0, 0), (0.3, 0.6), (1, 0), (0, 1), (0.6, 0.8), (0.2, 0.1)])
def test_four_input_closed_form_matches_covariance(al, be):
    a, b2, b3, P = (1.0, -0.7, 1.2, 0.9), 1.5, 2.0, (1.0, 2.0, 1.5, 3.0)
    e, net = prop4_setup(a, b2, b3, P)
    route = evaluate_gaussian_expr(e, PROP4_PARAM, {"alpha": al, "beta": be}, net)
    assert route == pytest.approx(float(prop4_objective(al, be, a, b2, b3, P)), abs=1e-9)


def test_four_input_infeasible_rejected():
    e, net = prop4_setup()
    with pytest.raises(ValueError):
        evaluate_gaussian_expr(e, PROP4_PARAM, {"alpha": 0.9, "beta": 0.9}, net)


def test_four_input_zero_power():
    val, _, _ = prop4_capacity((1, 1, 1, 1), 1.5, 2, (0, 0, 0, 0))
    assert val == pytest.approx(0, abs=1e-12)


def test_four_input_without_shared_transmitter():
    a, b2, b3, P = (1.0, 0.7, 1.2, 0.9), 1.5, 2.0, (1.0, 2.0, 1.5, 0.0)
    want = psi(a[2] ** 2 * P[2] / b2 ** 2) + psi((a[0] * math.sqrt(P[0]) + a[1] * math.sqrt(P[1])) ** 2
                                                 / (a[2] ** 2 * P[2] + (b2 * b3) ** 2))
    val, _, _ = prop4_capacity(a, b2, b3, P)
    assert val == pytest.approx(want, abs=1e-12)


def test_four_input_optimum_beats_corners():
    a, b2, b3, P = (1.0, 0.7, 1.2, 0.9), 1.5, 2.0, (1.0, 2.0, 1.5, 3.0)
    val, al, be = prop4_capacity(a, b2, b3, P)
    assert al * al + be * be <= 1 + 1e-12
    for x, y in [(0, 0), (1, 0), (0, 1), (0.6, 0.8)]:
        assert val >= float(prop4_objective(x, y, a, b2, b3, P)) - 1e-12


def test_four_input_rejects_bad_ratios():
    with pytest.raises(ValueError):
        prop4_capacity((1, 1, 1, 1), 0.5, 2, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        prop4_capacity((1, 1, 1, 1), 1.5, 2, (1, -1, 1, 1))


def shared_spec():
    return make_spec(2, 2, [msg("12", "2"), msg("1", "1"), msg("2", "1")])


@pytest.mark.parametrize("al,be", [(0, 0), (0.5, -0.2), (1, 0.3), (-0.7, 1), (1, 1)])
def test_two_input_closed_form_matches_covariance(al, be):
    a, b, P1, P2 = 3.0, 1 / 3, 5.0, 2.0
    net = GaussianNetwork(cross_gains(a, b), np.array([P1, P2]))
    route = evaluate_gaussian_expr(sumrate_expression(shared_spec()), PROP5_PARAM, {"alpha": al, "beta": be}, net)
    assert route == pytest.approx(float(prop5_objective(al, be, a, b, P1, P2)), abs=1e-9)


def test_two_input_no_common_part():
    a, b, P1, P2 = 15.0, 1 / 15, 100.0, 0.5
    assert float(prop5_objective(0, 0, a, b, P1, P2)) == pytest.approx(psi(P1 + a * a * P2))


def test_two_input_second_power_zero():
    a, b, P1 = 15.0, 1 / 15, 40.0
    val, al, _ = prop5_capacity(a, b, P1, 0.0)
    assert val == pytest.approx(psi(P1), abs=1e-9)
    assert al == pytest.approx(0, abs=1e-6)


def test_two_input_warns_off_condition():
    with pytest.warns(UserWarning):
        prop5_capacity(2.0, 2.0, 1.0, 1.0, points=11)


def test_maximize_box_simple():
    val, (x, y) = maximize_box(lambda x, y: -(x - 0.3) ** 2 - (y + 0.25) ** 2, (-1, -1), (1, 1), points=21)
    assert val == pytest.approx(0, abs=1e-14)
    assert x == pytest.approx(0.3, abs=1e-7) and y == pytest.approx(-0.25, abs=1e-7)


def test_maximize_box_tie_takes_first():
    val, (x,) = maximize_box(lambda x: np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0, (0,), (1,), 5)
    assert val == 0 and x == 0


def test_sweep_rows_and_monotone():
    rows = sweep_prop5(15, 1 / 15, 200, 0, 1000, 20)
    assert len(rows) == 20 and rows[0] == (0.0, 0.0, 0.0, 0.0)
    opt = [r[1] for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(opt, opt[1:]))
    for P, o, ra, rb in rows:
        assert o >= max(ra, rb) - 1e-12
        if P > 0:
            assert o > max(ra, rb)


def test_sweep_single_point_and_csv():
    rows = sweep_prop5(15, 1 / 15, 200, 50, 50, 1)
    assert len(rows) == 1 and rows[0][0] == 50.0
    text = sweep_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "P,optimal,alpha1,beta1"
    assert [float(v) for v in lines[1].split(",")] == pytest.approx(rows[0], rel=1e-11)


def test_optimizer_against_scipy_multistart():
    from scipy.optimize import minimize
    rng = np.random.default_rng(7)
    for _ in range(3):
        a = rng.uniform(0.3, 2, 4)
        b2, b3 = rng.uniform(1, 3, 2)
        P = rng.uniform(0.1, 10, 4)
        val, _, _ = prop4_capacity(a, b2, b3, P)
        best = -np.inf
        for r0, t0 in rng.uniform([0, 0], [1, math.pi / 2], size=(20, 2)):
            f = lambda z: -float(prop4_objective(z[0] * math.cos(z[1]), z[0] * math.sin(z[1]), a, b2, b3, P))
            res = minimize(f, [r0, t0], bounds=[(0, 1), (0, math.pi / 2)], method="L-BFGS-B")
            best = max(best, -res.fun)
        assert val >= best - 1e-6


def test_spec_round_trip_network():
    spec = make_spec(2, 2, [msg("1", "1")], gaussian=GaussianChannel(((1.0, 2.0), (3.0, 4.0)), (1.0, 2.0)))
    net = GaussianNetwork.from_spec(spec)
    assert net.gains.shape == (2, 2) and list(net.powers) == [1.0, 2.0]


def test_missing_realisation_raises():
    e = RateExpression((MITerm(("Z_9",), (1,), ()),), FactorizationLaw((), (), False), "x")
    net = GaussianNetwork(np.array([[1.0]]), np.array([1.0]))
    with pytest.raises(KeyError):
        evaluate_gaussian_expr(e, single_param(), {}, net)
