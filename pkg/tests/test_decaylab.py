"""Rate calculators, measurements, and consistency checks."""

import math

import numpy as np
import pytest

from semistab import decaylab, numcore, operators
from semistab.errors import DomainError

INF = math.inf


def test_general_rate_examples():
    p = decaylab.predict_rate_general(0.0, 1.0, 0.0, 3.0)
    assert p.applicable and p.rho == pytest.approx(1.0) and p.strict
    p = decaylab.predict_rate_general(0.0, 0.0, 1.0, 2.0)
    assert p.applicable and p.rho == INF
    p = decaylab.predict_rate_general(1.0, 0.0, 2.0, 1.5)
    assert p.applicable and p.rho == pytest.approx(2.0)
    p = decaylab.predict_rate_general(2.0, 1.0, 0.5, 3.0)
    assert not p.applicable and p.rho is None  # sigma <= alpha - 1


def test_hilbert_branch():
    geo = decaylab.GeometryDescriptor(hilbert=True)
    p = decaylab.predict_rate_fourier_type(0.0, 2.0, 0.0, 4.0, geo)
    assert p.applicable and p.rho == pytest.approx(1.0)
    assert not p.strict  # beta branch attained
    p0 = decaylab.predict_rate_fourier_type(0.0, 2.0, 0.0, 2.0, geo)
    assert p0.applicable and p0.rho == pytest.approx(0.0)
    below = decaylab.predict_rate_fourier_type(0.0, 2.0, 0.0, 1.5, geo)
    assert not below.applicable


def test_fourier_type_p1_equals_general():
    geo = decaylab.GeometryDescriptor(fourier_type=1.0)
    rng = np.random.default_rng(0)
    for _ in range(200):
        args = (
            float(rng.choice([0.0, rng.uniform(0, 3)])),
            float(rng.choice([0.0, rng.uniform(0, 3)])),
            float(rng.uniform(0, 5)),
            float(rng.uniform(0, 6)),
        )
        a = decaylab.predict_rate_general(*args)
        b = decaylab.predict_rate_fourier_type(*args, geo)
        assert a.applicable == b.applicable
        assert a.rho == b.rho


def test_type_cotype_branches():
    hil = decaylab.predict_rate_type_cotype(
        0.0, 2.0, 0.0, 4.0, decaylab.GeometryDescriptor(type_p=2.0, cotype_q=2.0,
                                                        r_resolvent_growth_asserted=True)
    )
    assert hil.applicable and hil.rho == pytest.approx(1.0)
    assert hil.source == "type-cotype-hilbert"

    missing = decaylab.predict_rate_type_cotype(
        0.0, 2.0, 0.0, 4.0, decaylab.GeometryDescriptor(type_p=2.0, cotype_q=4.0)
    )
    assert not missing.applicable
    assert any("asserted" in c.name and not c.passed for c in missing.conditions)

    # L^u-style space, u = 4: type/cotype index 1/r = 1/2 - 1/4, strictly
    # smaller than the Fourier-type index 2/min(u,u') - 1 = 1/2
    geo = decaylab.GeometryDescriptor(type_p=2.0, cotype_q=4.0, r_resolvent_growth_asserted=True)
    tc = decaylab.predict_rate_type_cotype(0.0, 1.0, 0.0, 3.0, geo)
    assert tc.r_index == pytest.approx(0.25)
    ft = decaylab.predict_rate_fourier_type(
        0.0, 1.0, 0.0, 3.0, decaylab.GeometryDescriptor(fourier_type=4.0 / 3.0)
    )
    assert ft.r_index == pytest.approx(0.5)
    assert tc.rho > ft.rho

    lat = decaylab.predict_rate_type_cotype(
        0.0, 2.0, 0.0, 2.25,
        decaylab.GeometryDescriptor(type_p=2.0, cotype_q=4.0, lattice=(2.0, 4.0),
                                    r_resolvent_growth_asserted=True),
    )
    # lattice branch permits tau = beta + 1/r exactly
    assert lat.source == "type-cotype-lattice"
    assert lat.applicable and lat.rho == pytest.approx(0.0)


def test_asymptotically_analytic():
    p = decaylab.predict_rate_asymptotically_analytic(1.0, 2.0, zeta_negative_asserted=True)
    assert p.applicable and p.rho == pytest.approx(2.0)
    p = decaylab.predict_rate_asymptotically_analytic(0.0, 2.0, zeta_negative_asserted=True)
    assert p.rho == INF
    p = decaylab.predict_rate_asymptotically_analytic(2.0, 1.0, zeta_negative_asserted=True)
    assert not p.applicable  # boundary sigma = alpha - 1 excluded
    p = decaylab.predict_rate_asymptotically_analytic(1.0, 2.0, zeta_negative_asserted=False)
    assert not p.applicable


def test_growth_aware():
    rates = decaylab.predict_rate_growth_aware(0.0, 1.0, 0.0, 3.0, 1.0)
    assert rates.scaling is not None and rates.scaling.log_factor
    assert rates.scaling.rho == pytest.approx(2.0)
    assert rates.stronger == "scaling"
    flat = decaylab.predict_rate_growth_aware(1.0, 2.0, 2.0, 3.0, 0.0)
    assert flat.plain.rho == pytest.approx(min(2.0 / 1.0, 3.0 / 2.0))
    neg = decaylab.predict_rate_growth_aware(0.0, 1.0, 0.0, 0.5, 2.0)
    assert not neg.plain.applicable
    with pytest.raises(DomainError):
        decaylab.predict_rate_growth_aware(0.0, 1.0, 0.0, 1.0, -0.5)


def test_interpolation():
    assert decaylab.interpolate_rates((2.0, 3.0, 2.0), (1.0, 1.0, 0.0), 0.0) == (1.0, 1.0, 0.0)
    sig, tau, rho = decaylab.interpolate_rates((2.0, 3.0, 2.0), (1.0, 1.0, 0.0), 0.5)
    assert (sig, tau, rho) == (1.5, 2.0, 1.0)
    sig, tau, rho = decaylab.interpolate_rates((1.0, 2.0, 1.0), (0.0, 0.0, 0.0), 2.0)
    assert (sig, tau, rho) == (2.0, 4.0, 2.0)
    with pytest.raises(DomainError):
        decaylab.interpolate_rates((1.0, 1.0, 1.0), (2.0, 2.0, 0.0), 0.5)


def test_smoothness_index():
    assert decaylab.exponential_smoothness_index(
        decaylab.GeometryDescriptor(hilbert=True)
    ).value == pytest.approx(0.0)
    idx = decaylab.exponential_smoothness_index(
        decaylab.GeometryDescriptor(fourier_type=1.0)
    )
    assert idx.value == pytest.approx(1.0)
    lat = decaylab.exponential_smoothness_index(
        decaylab.GeometryDescriptor(
            fourier_type=1.0, lattice=(1.0, 3.0), positive_semigroup=True
        )
    )
    assert lat.value == pytest.approx(1.0 - 1.0 / 3.0)
    assert lat.source == "positive-lattice"
    # unconditional double index is available without the R-growth assertion
    tc = decaylab.exponential_smoothness_index(
        decaylab.GeometryDescriptor(type_p=2.0, cotype_q=4.0)
    )
    assert tc.value == pytest.approx(0.5)
    assert tc.source == "type-cotype-unconditional"


def test_measure_decay_exponential_flagged_super_polynomial():
    model = operators.DenseMatrixModel([[1.0]])
    meas = decaylab.measure_decay(model, 0.0, 1.0, numcore.geometric_grid(1.0, 40.0, 24))
    assert meas.super_polynomial
    pred = decaylab.predict_rate_general(0.0, 0.0, 0.0, 2.0)
    assert pred.rho == INF
    rep = decaylab.check_consistency(meas, pred, 0.05)
    assert rep.passed


def test_measure_decay_power_law_not_flagged():
    model = operators.OperatorMatrixModel(2, 32)
    meas = decaylab.measure_decay(model, 0.0, 0.0, numcore.geometric_grid(10.0, 1e3, 20))
    assert not meas.super_polynomial
    assert meas.rho_hat == pytest.approx(-1.0, abs=0.05)  # ||T(t)|| ~ t


def test_check_consistency_orderings():
    model = operators.OperatorMatrixModel(2, 32)
    meas = decaylab.measure_decay(model, 1.0, 0.0, numcore.geometric_grid(10.0, 1e3, 20))
    good = decaylab.RatePrediction(0.0, True, 1.0, "stub", ())
    assert decaylab.check_consistency(meas, good, 0.05).passed
    strong = decaylab.RatePrediction(2.0, True, 1.0, "stub", ())
    rep = decaylab.check_consistency(meas, strong, 0.05)
    assert not rep.passed and rep.margin == pytest.approx(meas.rho_hat - 2.0)
    gated = decaylab.predict_rate_general(2.0, 1.0, 0.5, 3.0)
    with pytest.raises(DomainError):
        decaylab.check_consistency(meas, gated, 0.05)


def test_geometry_validation():
    geo = decaylab.GeometryDescriptor(hilbert=True)
    assert geo.fourier_type == 2.0 and geo.type_p == 2.0 and geo.cotype_q == 2.0
    with pytest.raises(DomainError):
        decaylab.GeometryDescriptor(fourier_type=3.0)
    with pytest.raises(DomainError):
        decaylab.GeometryDescriptor(cotype_q=1.5)
    with pytest.raises(DomainError):
        decaylab.GeometryDescriptor(lattice=(0.5, 3.0))


def test_prediction_monotone_small_sweep():
    geo = decaylab.GeometryDescriptor(fourier_type=1.5)
    rng = np.random.default_rng(2)

    def key(p):
        return -INF if not p.applicable else p.rho

    for _ in range(300):
        a, b = rng.uniform(0, 3, 2)
        s, t = rng.uniform(0, 6, 2)
        d = rng.uniform(0.01, 1.0)
        base = key(decaylab.predict_rate_fourier_type(a, b, s, t, geo))
        assert key(decaylab.predict_rate_fourier_type(a, b, s + d, t, geo)) >= base
        assert key(decaylab.predict_rate_fourier_type(a, b, s, t + d, geo)) >= base
        assert key(decaylab.predict_rate_fourier_type(a + d, b, s, t, geo)) <= base
        assert key(decaylab.predict_rate_fourier_type(a, b + d, s, t, geo)) <= base
