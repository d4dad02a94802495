"""Discrete transforms, multiplier application, and norm estimates."""

import math

import numpy as np
import pytest

from semistab import multiplier, operators
from semistab.errors import DomainError, ShapeError, SingularSymbolError, WindowError


@pytest.fixture
def grid():
    return multiplier.FourierGridSpec(64.0, 2**10)


def _bump(grid, center=0.0, width=2.0, freq=0.0):
    ts = grid.times
    return np.exp(-0.5 * ((ts - center) / width) ** 2) * np.exp(1j * freq * ts)


def test_grid_validation():
    with pytest.raises(DomainError):
        multiplier.FourierGridSpec(-1.0, 8)
    with pytest.raises(DomainError):
        multiplier.FourierGridSpec(10.0, 100)  # not a power of two


def test_round_trip(grid):
    rng = np.random.default_rng(0)
    f = rng.standard_normal(grid.samples) + 1j * rng.standard_normal(grid.samples)
    back = multiplier.fourier_inverse(multiplier.fourier_forward(f, grid), grid)
    assert np.max(np.abs(back - f)) < 1e-12


def test_parseval_fixes_normalization(grid):
    rng = np.random.default_rng(1)
    f = rng.standard_normal(grid.samples) + 1j * rng.standard_normal(grid.samples)
    fhat = multiplier.fourier_forward(f, grid)
    lhs = grid.dxi * np.sum(np.abs(fhat) ** 2)
    rhs = 2.0 * math.pi * grid.dt * np.sum(np.abs(f) ** 2)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_identity_symbol(grid):
    f = _bump(grid, freq=1.0)
    sym = multiplier.scalar_symbol(lambda x: np.ones_like(np.asarray(x, dtype=complex)))
    out = multiplier.apply_multiplier(sym, f, grid)
    assert np.max(np.abs(out - f)) < 1e-12


def test_shift_symbol_is_circular_shift(grid):
    f = _bump(grid, center=3.0)
    h = 8.0 * grid.dt
    sym = multiplier.scalar_symbol(lambda x: np.exp(-1j * np.asarray(x) * h))
    out = multiplier.apply_multiplier(sym, f, grid)
    assert np.max(np.abs(out - np.roll(f, 8))) < 1e-10


def test_scalar_resolvent_symbol_matches_causal_convolution():
    a = 1.0
    grid = multiplier.FourierGridSpec(200.0 / a, 2**14)
    f = _bump(grid, center=0.0, width=1.5)
    sym = multiplier.scalar_symbol(lambda x: 1.0 / (1j * np.asarray(x) + a))
    out = multiplier.apply_multiplier(sym, f, grid)
    # direct quadrature of the causal convolution with e^{-a t}: the kernel
    # samples start at t = 0, so the linear convolution aligns with the grid
    ts = grid.times
    tpos = ts[ts >= 0.0]
    kernel = np.exp(-a * tpos)
    w = np.full(len(tpos), grid.dt)
    w[0] *= 0.5
    direct = np.convolve(kernel * w, f)[: grid.samples]
    err = np.linalg.norm(out - direct) / np.linalg.norm(direct)
    assert err < 1e-3


def test_exact_l2_norm_values(grid):
    sym = multiplier.scalar_symbol(lambda x: 1.0 / (1j * np.asarray(x) + 2.0))
    assert multiplier.exact_l2_norm(sym, grid) == pytest.approx(0.5, rel=1e-9)
    model = operators.DenseMatrixModel(np.diag([1.0 + 5.0j, 3.0]))
    rsym = multiplier.resolvent_power_symbol(model, 1)
    # normal matrix: sup over xi of max_mu 1/|i xi + mu|; the xi grid hits
    # -Im(mu) = -5 exactly only approximately
    got = multiplier.exact_l2_norm(rsym, grid)
    assert got == pytest.approx(1.0, rel=0.02)


def test_lower_bound_constant_symbol(grid):
    sym = multiplier.scalar_symbol(lambda x: 0.7 * np.ones_like(np.asarray(x, dtype=complex)))
    est = multiplier.estimate_pq_norm_lower(sym, 2.0, 2.0, grid, trials=4, seed=1)
    assert est.lower_bound >= 0.99 * 0.7
    assert est.lower_bound <= multiplier.exact_l2_norm(sym, grid) + 1e-6


def test_lower_bound_requires_q_at_least_p(grid):
    sym = multiplier.scalar_symbol(lambda x: np.ones_like(np.asarray(x, dtype=complex)))
    with pytest.raises(DomainError):
        multiplier.estimate_pq_norm_lower(sym, 2.0, 1.0, grid)


def test_lower_bound_one_infinity_respects_kernel_sup():
    # the (1, oo) multiplier of a stable resolvent symbol is convolution
    # against the semigroup, so sup_t ||T(t)|| bounds it from above
    rng = np.random.default_rng(7)
    m = rng.standard_normal((3, 3)) / 3.0 + 0.8 * np.eye(3)
    model = operators.DenseMatrixModel(m)
    grid = multiplier.FourierGridSpec(120.0, 2**11)
    sym = multiplier.resolvent_power_symbol(model, 1)
    est = multiplier.estimate_pq_norm_lower(sym, 1.0, math.inf, grid, trials=6, seed=2)
    kernel_sup = max(model.semigroup_norm(t) for t in np.linspace(0.0, 30.0, 120))
    assert est.lower_bound <= kernel_sup + 1e-6


def test_upper_bound_values(grid):
    zero = multiplier.scalar_symbol(lambda x: np.zeros_like(np.asarray(x, dtype=complex)))
    assert multiplier.upper_bound_pq_norm_fourier_type(zero, 1.0, math.inf, grid).upper_bound == 0.0
    lor = multiplier.scalar_symbol(lambda x: (1.0 + np.abs(np.asarray(x))) ** -2.0)
    got = multiplier.upper_bound_pq_norm_fourier_type(lor, 1.0, math.inf, grid).upper_bound
    # (1/2 pi) * F_1^2 * integral of (1+|xi|)^-2 = 2/(2 pi) = 1/pi
    assert got == pytest.approx(1.0 / math.pi, rel=0.05)
    with pytest.raises(DomainError):
        multiplier.upper_bound_pq_norm_fourier_type(lor, 2.0, 1.0, grid)
    with pytest.raises(DomainError):
        multiplier.fourier_constant(1.5)


def test_singular_symbol_modes(grid):
    def inv(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / (1j * np.asarray(x, dtype=complex))

    f = _bump(grid)
    err_sym = multiplier.Symbol(inv, at_zero="error", name="1/(i xi)")
    with pytest.raises(SingularSymbolError) as err:
        multiplier.apply_multiplier(err_sym, f, grid)
    assert err.value.node == 0.0
    zero_sym = multiplier.Symbol(inv, at_zero="zero")
    out = multiplier.apply_multiplier(zero_sym, f, grid)
    assert np.all(np.isfinite(out))


def test_semigroup_convolution_identity_and_pulse():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((3, 3)) / 3.0 + 1.0 * np.eye(3)
    model = operators.DenseMatrixModel(m)
    grid = multiplier.FourierGridSpec(80.0, 2**12)
    f = _bump(grid, center=2.0, width=2.0)[:, None] * np.ones((1, 3))
    for k in (0, 1):
        conv = multiplier.semigroup_convolution(model, k, f, grid)
        sym = multiplier.resolvent_power_symbol(model, k + 1)
        via = math.factorial(k) * multiplier.apply_multiplier(sym, f, grid)
        assert np.linalg.norm(conv - via) / np.linalg.norm(via) < 1e-3
    # a delta-like pulse reproduces s^k T(s) x
    pulse = np.zeros((grid.samples, 3), dtype=complex)
    i0 = int(np.argmin(np.abs(grid.times)))
    x = np.array([1.0, -0.5, 0.25], dtype=complex)
    pulse[i0] = x / grid.dt
    out = multiplier.semigroup_convolution(model, 1, pulse, grid)
    for s in (2.0, 5.0):
        i = int(np.argmin(np.abs(grid.times - s)))
        want = grid.times[i] * (model._expm_neg(grid.times[i]) @ x)
        assert np.linalg.norm(out[i] - want) / np.linalg.norm(want) < 1e-2


def test_convolution_window_errors():
    growing = operators.DenseMatrixModel([[-0.2]])  # semigroup e^{0.2 t} grows
    grid = multiplier.FourierGridSpec(40.0, 2**10)
    f = _bump(grid)[:, None]
    with pytest.raises(WindowError):
        multiplier.semigroup_convolution(growing, 0, f, grid)
    slow = operators.DenseMatrixModel([[0.05]])  # decays too slowly for the window
    with pytest.raises(WindowError):
        multiplier.semigroup_convolution(slow, 0, f, grid)


def test_laplace_identity_window_error():
    model = operators.DenseMatrixModel([[1.0]])
    x = np.array([1.0 + 0j])
    with pytest.raises(WindowError):
        multiplier.verify_laplace_identity(model, 0, x, multiplier.FourierGridSpec(5.0, 2**10))


def test_laplace_identity_scalar():
    # transform of t^n e^{-t} recovers n! (i xi + 1)^(-n-1)
    model = operators.DenseMatrixModel([[1.0]])
    x = np.array([1.0 + 0j])
    grid = multiplier.FourierGridSpec(100.0, 2**14)
    for n in (0, 2):
        assert multiplier.verify_laplace_identity(model, n, x, grid) < 1e-3


def test_apply_multiplier_shape_errors(grid):
    sym = multiplier.scalar_symbol(lambda x: np.ones_like(np.asarray(x, dtype=complex)))
    with pytest.raises(ShapeError):
        multiplier.apply_multiplier(sym, np.ones(grid.samples // 2), grid)
    model = operators.DenseMatrixModel(np.eye(2))
    rsym = multiplier.resolvent_power_symbol(model, 1)
    with pytest.raises(ShapeError):
        multiplier.apply_multiplier(rsym, np.ones(grid.samples), grid)
