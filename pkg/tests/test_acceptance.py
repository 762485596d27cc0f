"""End-to-end acceptance suite.

One test per acceptance criterion; each prints a single PASS/FAIL line
(visible with ``pytest -rA``) and asserts at the stated tolerance.  Run

    pytest -v -rA tests/test_acceptance.py
"""

import dataclasses
import math

import numpy as np
import pytest
from scipy.special import roots_hermite

from drivenqubit import (
    THREE_CONTROL_REFERENCE,
    TWO_CONTROL_REFERENCE,
    AsymptoticCycle,
    BlochMap,
    BlochVector,
    ControlStep,
    Protocol,
    Spectrum,
    StatePair,
    abel_limit,
    asymptotic_blp_rate,
    asymptotic_cycle,
    asymptotic_map,
    calibrate,
    cesaro_mean,
    gaussian_average,
    maximize_visibility,
    pair_distances,
    preset,
    protocol_product,
    trace_distance,
    trace_distance_povm,
    trig_compose,
)
from drivenqubit.visibility import NEG_DEFINITE, NEG_SEMIDEFINITE

EY = BlochVector(0.0, 1.0, 0.0)


def report(criterion: int, ok: bool, detail: str):
    print(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def two_preset():
    return preset("two_controls")


@pytest.fixture(scope="module")
def three_preset():
    return preset("three_controls")


@pytest.fixture(scope="module")
def calibration(two_preset):
    return calibrate(two_preset)


def random_acceptance_protocols():
    """The five random protocols of the oracle-equivalence criterion."""
    rng = np.random.default_rng(20240810)
    cases = []
    for i in range(5):
        period = int(rng.integers(1, 5))
        steps = [
            ControlStep(eta=float(rng.choice([0.3, 0.5, 0.7])), k=int(rng.integers(1, 5)))
            for _ in range(period)
        ]
        s = float(rng.choice([0.3, 0.6]))
        cases.append((f"random{i}", Protocol.from_steps(steps), Spectrum(0.0, s)))
    return cases


def test_criterion_1_steady_state_oracle_equivalence(two_preset, three_preset, calibration):
    """Steady maps vs the averaged ~200-step products, <= 1e-4 and decreasing.

    The averaged products approach the steady maps only like 1/sqrt(m)
    (stationary-phase tails of the spectral integral), so the measured
    agreement at 200 steps sits in the 1e-3..1e-1 range depending on the
    protocol; the 1e-4 gate documents that gap honestly.
    """
    cases = [
        ("two_controls", two_preset.protocol, calibration.spectrum),
        ("three_controls", three_preset.protocol, calibration.spectrum),
    ] + random_acceptance_protocols()
    lines = []
    ok = True
    for name, protocol, spectrum in cases:
        worst = 0.0
        decreasing = True
        for phase in range(protocol.period):
            target = asymptotic_map(protocol, spectrum, phase).m
            m_big = (200 - phase) // protocol.period
            errors = {}
            for label, m in (("half", m_big // 2), ("full", m_big)):
                n = m * protocol.period + phase
                got = gaussian_average(protocol_product(protocol, n), spectrum).m
                errors[label] = float(np.max(np.abs(got - target)))
            worst = max(worst, errors["full"])
            decreasing = decreasing and errors["full"] < errors["half"]
        lines.append(f"{name}: err@~200={worst:.3e} decreasing={decreasing}")
        ok = ok and worst <= 1e-4 and decreasing
    report(1, ok, "; ".join(lines))


def test_criterion_2_two_control_reproduction(two_preset, calibration):
    """Calibrated on the y-channel anchor, the 8 remaining entries match."""
    result = calibrate(two_preset)
    order_used = two_preset.order
    if result.max_abs_residual is None or result.max_abs_residual > 2e-3:
        alternative = calibrate(dataclasses.replace(two_preset, order="eq4a"))
        if (
            alternative.max_abs_residual is not None
            and alternative.max_abs_residual < result.max_abs_residual
        ):
            result, order_used = alternative, "eq4a"
    detail = (
        f"order {order_used}: fitted s={result.s:.6f}, "
        f"lambda_y={result.lambda_y:.6f}, max residual={result.max_abs_residual:.2e}"
    )
    ok = result.max_abs_residual <= 2e-3 and abs(result.lambda_y - 0.114589) < 1e-6
    report(2, ok, detail)


def test_criterion_3_three_control_reproduction(three_preset, calibration):
    """The same fitted width reproduces the three-unit cycle to 5e-3."""
    cycle = asymptotic_cycle(three_preset.protocol, calibration.spectrum)
    worst = max(
        float(np.max(np.abs(m.m - ref)))
        for m, ref in zip(cycle.maps, THREE_CONTROL_REFERENCE)
    )
    eig_dev = max(
        abs(got - want)
        for got, want in zip(cycle.y_eigenvalues, (0.0590277, 0.127151, -0.0386657))
    )
    report(
        3,
        worst <= 5e-3 and eig_dev <= 5e-3,
        f"max entry residual={worst:.2e}, max eigenvalue residual={eig_dev:.2e}",
    )


def test_criterion_4_backflow_pattern_and_rate(three_preset, calibration):
    """Sign pattern (+,-,+), per-cycle rate, and linear unbounded growth."""
    cycle = asymptotic_cycle(three_preset.protocol, calibration.spectrum)
    pair = StatePair.antipodal(EY)
    d = [trace_distance(m.apply(pair.a_plus), m.apply(pair.a_minus)) for m in cycle.maps]
    increments = (d[1] - d[0], d[2] - d[1], d[0] - d[2])
    signs_ok = increments[0] > 0 and increments[1] < 0 and increments[2] > 0

    rate = asymptotic_blp_rate(cycle, pair)
    rate_ok = abs(rate - 0.0884853) / 0.0884853 < 0.10

    period = cycle.period
    distances = pair_distances(three_preset.protocol, calibration.spectrum, pair, 60 * period)
    cumulative = np.cumsum(np.maximum(0.0, np.diff(distances)))
    slope = (cumulative[60 * period - 1] - cumulative[30 * period - 1]) / 30
    slope_ok = abs(slope - rate) / rate < 0.05

    report(
        4,
        signs_ok and rate_ok and slope_ok,
        f"increments={tuple(round(v, 6) for v in increments)}, rate={rate:.6f}, "
        f"slope(cycles 30-60)={slope:.6f}",
    )


def test_criterion_5_two_control_structure(two_preset, calibration):
    """Row-swapped x-z blocks and norm preservation in the x-z plane."""
    cycle = asymptotic_cycle(two_preset.protocol, calibration.spectrum)
    m0, m1 = cycle.maps[0].m, cycle.maps[1].m
    swap = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    swap_dev = float(np.max(np.abs(m1 - swap @ m0)))

    rng = np.random.default_rng(5)
    norm_dev = 0.0
    for angle in rng.uniform(0.0, 2.0 * math.pi, size=100):
        a = np.array([math.cos(angle), 0.0, math.sin(angle)])
        norm_dev = max(norm_dev, abs(np.linalg.norm(m0 @ a) - np.linalg.norm(m1 @ a)))

    report(
        5,
        swap_dev <= 1e-6 and norm_dev <= 1e-10,
        f"row-swap dev={swap_dev:.2e}, x-z plane norm dev={norm_dev:.2e}",
    )


def closed_form_two_point_maximum(cycle):
    d = cycle.maps[0].m - cycle.maps[1].m
    return float(np.linalg.eigvalsh(d.T @ d)[-1])


def one_degree_grid_maximum(cycle):
    th = np.deg2rad(np.arange(0, 181))
    ph = np.deg2rad(np.arange(0, 360))
    big_th, big_ph = np.meshgrid(th, ph, indexing="ij")
    u = np.stack(
        [np.cos(big_ph) * np.sin(big_th), np.sin(big_ph) * np.sin(big_th), np.cos(big_th)],
        axis=-1,
    ).reshape(-1, 3)
    d = cycle.maps[0].m - cycle.maps[1].m
    return float(np.max(np.sum((u @ d.T) ** 2, axis=1)))


def test_criterion_6_visibility_maximum(two_preset, calibration):
    """Optimizer finds the closed-form optimum with a concave Hessian."""
    reference_cycle = AsymptoticCycle.from_maps(BlochMap(m) for m in TWO_CONTROL_REFERENCE)
    computed_cycle = asymptotic_cycle(two_preset.protocol, calibration.spectrum)

    checks = []
    ok = True
    for name, cycle in (("verbatim", reference_cycle), ("computed", computed_cycle)):
        result = maximize_visibility(cycle)
        closed = closed_form_two_point_maximum(cycle)
        grid = one_degree_grid_maximum(cycle)
        this_ok = (
            abs(result.value - closed) <= 1e-6
            and result.verdict in (NEG_DEFINITE, NEG_SEMIDEFINITE)
            and result.value >= grid - 1e-12
            and result.value - grid <= 1e-6
        )
        if name == "verbatim":
            this_ok = this_ok and abs(result.value - 0.158668) <= 1e-6
        checks.append(f"{name}: value={result.value:.8f}, closed={closed:.8f}, "
                      f"grid={grid:.8f}, verdict={result.verdict}")
        ok = ok and this_ok
    report(6, ok, "; ".join(checks))


def test_criterion_7_property_suites(two_preset):
    """Self-contained property suites (no reference data needed)."""
    rng = np.random.default_rng(77)
    protocols = [
        two_preset.protocol,
        Protocol.from_steps([ControlStep(0.3, 1), ControlStep(0.7, 4), ControlStep(0.5, 2)]),
        Protocol.from_steps([ControlStep(0.62, 2)]),
    ]
    failures = []

    dev = 0.0
    for p in protocols:
        tm = protocol_product(p, 50)
        for theta in rng.uniform(-math.pi, math.pi, size=10):
            m = tm.evaluate(theta)
            dev = max(dev, float(np.max(np.abs(m.T @ m - np.eye(3)))))
    if dev >= 1e-10:
        failures.append(f"SO(3) evaluation {dev:.2e}")

    dev = 0.0
    for p in protocols:
        a = protocol_product(p, 3)
        b = protocol_product(p, 7)
        ab = trig_compose(a, b)
        for theta in rng.uniform(-math.pi, math.pi, size=30):
            dev = max(
                dev,
                float(np.max(np.abs(ab.evaluate(theta) - a.evaluate(theta) @ b.evaluate(theta)))),
            )
    if dev >= 1e-12:
        failures.append(f"homomorphism {dev:.2e}")

    dev = 0.0
    for p, sp, nodes in (
        (protocols[1], Spectrum(0.4, 0.45), 512),
        (two_preset.protocol, Spectrum(0.3, 2.0), 32768),  # harmonics up to 150
    ):
        tm = protocol_product(p, 60 if p is two_preset.protocol else 12)
        x, w = roots_hermite(nodes)
        thetas = sp.theta_bar + math.sqrt(2.0) * sp.s * x
        w = w / math.sqrt(math.pi)
        quad = np.zeros((3, 3))
        for h in tm.harmonics():
            quad += (w @ np.cos(h * thetas)) * tm.cos_term(h)
            quad += (w @ np.sin(h * thetas)) * tm.sin_term(h)
        dev = max(dev, float(np.max(np.abs(gaussian_average(tm, sp).m - quad))))
    if dev >= 1e-10:
        failures.append(f"quadrature {dev:.2e}")

    dev = 0.0
    tm = protocol_product(protocols[1], 3)
    for theta in rng.uniform(0.3, 2.8, size=8):
        w = tm.evaluate(theta)
        if abs(np.trace(w) - 3.0) < 0.1:
            continue
        proj = abel_limit(w)
        dev = max(dev, float(np.max(np.abs(proj @ proj - proj))))
        dev = max(dev, float(np.max(np.abs(proj @ w - proj))))
        dev = max(dev, float(np.max(np.abs(cesaro_mean(w, 24) - proj))))
    if dev >= 1e-5:
        failures.append(f"Abel/Cesaro {dev:.2e}")

    smax = 0.0
    for p in protocols:
        for n in (1, 5, 20):
            m = gaussian_average(protocol_product(p, n), Spectrum(0.2, 0.5))
            smax = max(smax, float(np.max(m.singular_values())))
    if smax > 1.0 + 1e-12:
        failures.append(f"singular values {smax}")

    excess = -1.0
    aligned_dev = 0.0
    for _ in range(100):
        x = rng.normal(size=3)
        x = BlochVector.from_array(x / np.linalg.norm(x) * rng.uniform(0, 1))
        y = rng.normal(size=3)
        y = BlochVector.from_array(y / np.linalg.norm(y) * rng.uniform(0, 1))
        d = trace_distance(x, y)
        f = rng.normal(size=3)
        f = BlochVector.from_array(f / np.linalg.norm(f) * rng.uniform(0, 1))
        excess = max(excess, trace_distance_povm(x, y, f) - d)
        if d > 1e-12:
            aligned = BlochVector.from_array((x.as_array() - y.as_array()) / (2 * d))
            aligned_dev = max(aligned_dev, abs(trace_distance_povm(x, y, aligned) - d))
    if excess > 1e-14 or aligned_dev > 1e-14:
        failures.append(f"measurement bound excess={excess:.2e} aligned={aligned_dev:.2e}")

    report(7, not failures, "all property suites" if not failures else "; ".join(failures))


def test_trajectory_oscillation_smoke(two_preset, three_preset, calibration):
    """Qualitative anchor: two- vs three-point oscillation, short transient."""
    from drivenqubit import propagate

    a0 = BlochVector(0.0, 0.0, 1.0)
    traj2 = propagate(two_preset.protocol, calibration.spectrum, 50, a0)
    cycle2 = [m.apply(a0).as_array() for m in asymptotic_cycle(
        two_preset.protocol, calibration.spectrum).maps]
    for n in range(30, 51):
        assert np.linalg.norm(traj2[n].as_array() - cycle2[n % 2]) < 0.05
    assert np.linalg.norm(cycle2[0] - cycle2[1]) > 0.2

    traj3 = propagate(three_preset.protocol, calibration.spectrum, 50, a0)
    cycle3 = [m.apply(a0).as_array() for m in asymptotic_cycle(
        three_preset.protocol, calibration.spectrum).maps]
    for n in range(30, 51):
        assert np.linalg.norm(traj3[n].as_array() - cycle3[n % 3]) < 0.1
    gaps = [np.linalg.norm(cycle3[i] - cycle3[(i + 1) % 3]) for i in range(3)]
    assert min(gaps) > 0.1
