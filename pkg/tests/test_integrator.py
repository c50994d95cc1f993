import math

import numpy as np
import pytest

from fracchenlee.errors import ConfigError
from fracchenlee.frackernel import gamma
from fracchenlee.integrator import (
    IntegratorConfig,
    convergence_report,
    euler_step,
    initial_condition,
    simulate,
    step_weight,
)
from fracchenlee.systems import SystemSpec

EXAMPLE3 = dict(h=0.01, N=500, rho=0.01, epsilon=0.01, t_kernel=502.0)
TARGET = (0.0, 1.0, 0.0)


def example3_system():
    return SystemSpec.controlled(-2, 1, -0.8, anchor=TARGET)


def forward_euler(a, c, k, anchor2, x, h, steps):
    """Independent classical reference for the controlled system."""
    out = [tuple(x)]
    x1, x2, x3 = x
    for _ in range(steps):
        d1 = a * x1 - x2 * x3
        d2 = x1 * x3 + k * (x2 - anchor2)
        d3 = (x1 * x2) / 3 - c * x3
        x1, x2, x3 = x1 + h * d1, x2 + h * d2, x3 + h * d3
        out.append((x1, x2, x3))
    return np.array(out)


def test_initial_condition():
    assert initial_condition((0, 1, 0), 0.01) == pytest.approx((0.01, 1.01, 0.01))
    assert initial_condition((0.3, -2, 5), 0.0) == (0.3, -2, 5)
    assert initial_condition((0, 0, 0), -0.5) == (-0.5, -0.5, -0.5)


def test_config_validation():
    with pytest.raises(ConfigError):
        IntegratorConfig(q=0.0)
    with pytest.raises(ConfigError):
        IntegratorConfig(h=0.0)
    with pytest.raises(ConfigError):
        IntegratorConfig(N=0)
    with pytest.raises(ConfigError):
        IntegratorConfig(rho=-1.0)
    with pytest.raises(ConfigError):
        IntegratorConfig(N=600, t_kernel=502.0)
    with pytest.raises(ConfigError):
        IntegratorConfig(kernel_mode="sideways")
    IntegratorConfig(N=600, t_kernel=502.0, kernel_mode="time-consistent")


def test_classical_order_step_is_forward_euler():
    cfg = IntegratorConfig(q=1.0, rho=0.0, h=0.05, N=10)
    sys = SystemSpec.controlled(-1, 2, -0.5, anchor=(0, 0.7, 0))
    x = (0.2, 0.4, -0.1)
    f = sys.rhs(x)
    assert euler_step(x, 3, cfg, sys) == tuple(xi + 0.05 * fi for xi, fi in zip(x, f))


def test_single_literal_step_by_hand():
    cfg = IntegratorConfig(q=0.55, **EXAMPLE3)
    x0 = (0.01, 1.01, 0.01)
    # hand evaluation of one update at j = 0
    g = (502.0 - 0.0) ** (0.55 - 1.0) * math.exp(-0.01 * 502.0) / math.gamma(0.55)
    f1 = -1.01 * 0.01 + (-2) * 0.01
    f2 = 0.01 * 0.01 + (-0.8) * (1.01 - 1.0)
    f3 = 0.01 * 1.01 / 3 - 1 * 0.01
    expected = (0.01 + 0.01 * g * f1, 1.01 + 0.01 * g * f2, 0.01 + 0.01 * g * f3)
    assert euler_step(x0, 0, cfg, example3_system()) == pytest.approx(expected, rel=1e-14, abs=1e-17)


def test_equilibrium_is_fixed(backend):
    cfg = IntegratorConfig(q=0.7, epsilon=0.0, N=200, **{k: v for k, v in EXAMPLE3.items() if k not in ("N", "epsilon")})
    traj = simulate(cfg, example3_system(), TARGET)
    assert len(traj) == 201
    assert np.array_equal(traj.x, np.tile(TARGET, (201, 1)))


def test_one_step_from_equilibrium(backend):
    cfg = IntegratorConfig(N=1, epsilon=0.0)
    traj = simulate(cfg, example3_system(), TARGET)
    assert len(traj) == 2 and np.array_equal(traj.x[0], traj.x[1])


@pytest.mark.parametrize("mode", ["paper-literal", "time-consistent"])
def test_classical_reduction(mode, backend):
    rng = np.random.default_rng(21)
    for _ in range(20):
        a, c, k = rng.uniform(-2, 2, 3)
        m = rng.uniform(-2, 2)
        eps = rng.uniform(-0.2, 0.2)
        cfg = IntegratorConfig(q=1.0, rho=0.0, h=0.01, N=100, epsilon=eps, t_kernel=150.0, kernel_mode=mode)
        traj = simulate(cfg, SystemSpec.controlled(a, c, k, anchor=(0, m, 0)), (0, m, 0))
        ref = forward_euler(a, c, k, m, (eps, m + eps, eps), 0.01, 100)
        assert np.max(np.abs(traj.x - ref)) <= 1e-14


def test_simulate_matches_repeated_steps(backend):
    cfg = IntegratorConfig(q=0.55, **EXAMPLE3)
    sys = example3_system()
    traj = simulate(cfg, sys, TARGET)
    x = initial_condition(TARGET, cfg.epsilon)
    for j in range(cfg.N):
        x = euler_step(x, j, cfg, sys)
        assert np.array_equal(traj.x[j + 1], x)


def test_runs_are_deterministic(backend):
    cfg = IntegratorConfig(q=0.8, kernel_mode="time-consistent")
    first = simulate(cfg, example3_system(), TARGET)
    second = simulate(cfg, example3_system(), TARGET)
    assert first.x.tobytes() == second.x.tobytes()


@pytest.mark.parametrize("mode", ["paper-literal", "time-consistent"])
@pytest.mark.parametrize("q", [0.1, 0.55, 1.0])
def test_step_weights_positive(mode, q):
    cfg = IntegratorConfig(q=q, rho=0.3, kernel_mode=mode, **{k: v for k, v in EXAMPLE3.items() if k != "rho"})
    assert all(step_weight(j, cfg) > 0.0 for j in range(cfg.N))


def test_time_consistent_weight_formula():
    cfg = IntegratorConfig(q=0.6, h=0.1, N=20, rho=0.2, t0=1.0, kernel_mode="time-consistent")
    j = 7
    lag = (1.0 + 21 * 0.1) - (1.0 + 7 * 0.1)
    expected = 0.1 * lag ** (0.6 - 1) * math.exp(-0.2 * lag) / gamma(0.6)
    assert step_weight(j, cfg) == pytest.approx(expected, rel=1e-14)


def test_literal_control_drops_offset():
    cfg = IntegratorConfig(q=1.0, rho=0.0, N=1, epsilon=0.0, control_mode="eq24-literal")
    traj = simulate(cfg, example3_system(), TARGET)
    # F2 = k * x2 = -0.8 at (0, 1, 0)
    assert traj.x[1] == pytest.approx([0.0, 1.0 - 0.01 * 0.8, 0.0])


def test_divergence_truncates(backend):
    cfg = IntegratorConfig(q=1.0, rho=0.0, h=0.1, N=5000, epsilon=1.0, kernel_mode="time-consistent")
    traj = simulate(cfg, SystemSpec.controlled(3, -2, 2), (0, 0, 0))
    assert traj.diverged
    assert len(traj) < cfg.N + 1
    assert np.all(np.isfinite(traj.x)) and np.max(np.abs(traj.x)) <= 1e12


def test_convergence_report_constant():
    cfg = IntegratorConfig(epsilon=0.0, N=50)
    rep = convergence_report(simulate(cfg, example3_system(), TARGET), TARGET)
    assert not rep.distances.any()
    assert rep.initial == rep.terminal == rep.minimum == 0.0 and rep.tail_nonincreasing


@pytest.mark.parametrize("q", [0.55, 1.0])
def test_example3_converges(q):
    traj = simulate(IntegratorConfig(q=q, **EXAMPLE3), example3_system(), TARGET)
    rep = convergence_report(traj, TARGET)
    assert rep.terminal < rep.initial and rep.tail_nonincreasing
    assert [tuple(s[2]) for s in list(traj)[:1]] == [(0.01, 1.01, 0.01)]


def test_unstable_origin_drifts_away():
    cfg = IntegratorConfig(q=0.55, kernel_mode="time-consistent", **EXAMPLE3)
    traj = simulate(cfg, SystemSpec.controlled(0.5, 0.8, -0.75), (0, 0, 0))
    rep = convergence_report(traj, (0, 0, 0))
    assert rep.terminal > rep.initial
