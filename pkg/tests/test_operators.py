"""Model zoo: semigroup, resolvent, and norm actions."""

import math
import warnings

import numpy as np
import pytest
from scipy.linalg import expm, toeplitz

from semistab import numcore, operators
from semistab.errors import (
    DomainError,
    EdgeDominatedWarning,
    NearSingularityError,
    ShapeError,
)


def _models(seed=0):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    m = m / 3.0 + 1.5 * np.eye(5)
    return {
        "dense": operators.DenseMatrixModel(m),
        "diagonal": operators.DiagonalSymbolModel(
            1.0, 0.5, numcore.geometric_grid(1.0 + 1e-6, 1e6, 256)
        ),
        "jordan": operators.JordanSumModel(0.5, 0.5, 500),
        "opmatrix": operators.OperatorMatrixModel(3, 128),
    }


def _random_state(model, rng):
    if isinstance(model, operators.DenseMatrixModel):
        return rng.standard_normal(model.dim) + 1j * rng.standard_normal(model.dim)
    if isinstance(model, operators.DiagonalSymbolModel):
        n = model.grid.count
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if isinstance(model, operators.JordanSumModel):
        blocks = [model.n_start, 17, 130]
        return {
            n: rng.standard_normal(model.block_size(n))
            + 1j * rng.standard_normal(model.block_size(n))
            for n in blocks
        }
    n = model.s_count
    return rng.standard_normal((n, model.n)) + 1j * rng.standard_normal((n, model.n))


def _apply_a(model, x):
    """Independent application of A, for the defining-identity check."""
    if isinstance(model, operators.DenseMatrixModel):
        return model.matrix @ x
    if isinstance(model, operators.DiagonalSymbolModel):
        return model.symbol(model.grid.nodes) * x
    if isinstance(model, operators.JordanSumModel):
        out = {}
        for n, v in x.items():
            shifted = np.zeros_like(v)
            shifted[:-1] = v[1:]
            out[n] = (model.gamma - 1j * n) * v - shifted
        return out
    # operator matrix: (s I - N) pointwise
    return model.s_nodes[:, None] * x - x @ model.nilp.T


def _diff(a, b):
    if isinstance(a, dict):
        num = math.sqrt(sum(float(np.sum(np.abs(a[n] - b[n]) ** 2)) for n in a))
        den = math.sqrt(sum(float(np.sum(np.abs(b[n]) ** 2)) for n in b))
        return num / den
    return float(np.linalg.norm(np.ravel(a - b)) / np.linalg.norm(np.ravel(b)))


def test_scalar_semigroup_value():
    model = operators.DenseMatrixModel([[1.0]])
    out = model.semigroup_apply(1.0, np.array([1.0]))
    assert out[0] == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert model.semigroup_norm(2.0) == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_scalar_resolvent_value():
    model = operators.DenseMatrixModel([[2.0]])
    out = model.resolvent_apply(3.0, np.array([1.0 + 0j]))
    assert out[0] == pytest.approx(1.0, rel=1e-14)  # x / (3 - 2)


@pytest.mark.parametrize("kind", ["dense", "diagonal", "jordan", "opmatrix"])
def test_identity_at_time_zero(kind):
    rng = np.random.default_rng(1)
    model = _models()[kind]
    x = _random_state(model, rng)
    assert _diff(model.semigroup_apply(0.0, x), x) < 1e-14


@pytest.mark.parametrize("kind", ["dense", "diagonal", "jordan", "opmatrix"])
def test_semigroup_law(kind):
    rng = np.random.default_rng(2)
    model = _models()[kind]
    for _ in range(3):
        t, s = rng.uniform(0.0, 5.0, 2)
        x = _random_state(model, rng)
        one = model.semigroup_apply(t + s, x)
        two = model.semigroup_apply(t, model.semigroup_apply(s, x))
        assert _diff(two, one) < 1e-8


@pytest.mark.parametrize("kind", ["dense", "diagonal", "jordan", "opmatrix"])
def test_resolvent_defining_identity(kind):
    rng = np.random.default_rng(3)
    model = _models()[kind]
    for lam in (3.0 + 0.0j, -1.0 + 2.0j, 0.7 - 4.3j):
        x = _random_state(model, rng)
        y = model.resolvent_apply(lam, x)
        ay = _apply_a(model, y)
        if isinstance(y, dict):
            back = {n: lam * y[n] - ay[n] for n in y}
        else:
            back = lam * y - ay
        assert _diff(back, x) < 1e-10


@pytest.mark.parametrize("kind", ["dense", "diagonal", "jordan", "opmatrix"])
def test_resolvent_identity(kind):
    rng = np.random.default_rng(4)
    model = _models()[kind]
    lam, mu = 2.0 + 1.5j, -0.7 + 3.0j
    x = _random_state(model, rng)
    r1 = model.resolvent_apply(lam, x)
    r2 = model.resolvent_apply(mu, x)
    rr = model.resolvent_apply(lam, model.resolvent_apply(mu, x))
    if isinstance(x, dict):
        lhs = {n: r1[n] - r2[n] for n in x}
        rhs = {n: (mu - lam) * rr[n] for n in x}
    else:
        lhs = r1 - r2
        rhs = (mu - lam) * rr
    scale = math.sqrt(sum(float(np.sum(np.abs(v) ** 2)) for v in (lhs.values() if isinstance(lhs, dict) else [lhs])))
    if scale == 0.0:
        return
    assert _diff(lhs, rhs) < 1e-8


def test_near_singularity_error_carries_distance():
    model = operators.DenseMatrixModel(np.diag([1.0, 2.0]))
    with pytest.raises(NearSingularityError) as err:
        model.resolvent_apply(1.0 + 1e-13j, np.array([1.0, 0.0]))
    assert err.value.distance < 1e-11


def test_shape_and_time_errors():
    model = operators.DenseMatrixModel(np.diag([1.0, 2.0]))
    with pytest.raises(ShapeError):
        model.semigroup_apply(1.0, np.ones(3))
    with pytest.raises(DomainError):
        model.semigroup_apply(-0.5, np.ones(2))


def test_dense_lower_resolvent_bound():
    rng = np.random.default_rng(5)
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    model = operators.DenseMatrixModel(m)
    for _ in range(10):
        lam = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        d = model.spectrum_distance(-lam)
        if d < 1e-6:
            continue
        assert model.shifted_resolvent_norm(lam) >= 1.0 / d - 1e-8


def test_jordan_exponential_polynomial_matches_dense_expm():
    model = operators.JordanSumModel(0.5, 0.5, 500)
    n = 130
    m = model.block_size(n)
    t = 2.7
    coeffs = operators._exp_series_coeffs(t, m)
    explicit = toeplitz(
        np.concatenate([[coeffs[0]], np.zeros(m - 1)]), coeffs.astype(complex)
    )
    b = operators._nilpotent(m)
    assert np.linalg.norm(explicit - expm(t * b), 2) / np.linalg.norm(explicit, 2) < 1e-10


def test_jordan_orbit_norm_closed_form():
    model = operators.JordanSumModel(0.4, 0.6, 400)
    n = 200
    m = model.block_size(n)
    for t in (1.0, float(m - 1)):
        out = model.semigroup_apply(t, model.basis_vector(n))
        want = math.exp(-model.gamma * t) * math.sqrt(
            sum((t**k / math.factorial(k)) ** 2 for k in range(m))
        )
        assert model.norm(out) == pytest.approx(want, rel=1e-12)


def test_jordan_sup_matches_brute_force():
    model = operators.JordanSumModel(0.5, 0.7, 200)
    for t, tau in ((3.0, 1.0), (7.0, 2.5)):
        screened = model.fractional_norm(t, 0.0, tau)
        best = 0.0
        for m, a, b in model.groups:
            for n in range(a, b + 1):
                rows = operators._shifted_power_rows(
                    np.array([1.0 + model.gamma - 1j * n]), -tau, m
                )
                coeffs = np.convolve(rows[0], operators._exp_series_coeffs(t, m))[:m]
                best = max(best, operators._toeplitz_norm(coeffs))
        best *= math.exp(-model.gamma * t)
        assert screened == pytest.approx(best, rel=1e-12)


def test_fractional_norm_is_one_at_zero_indices():
    for kind, model in _models().items():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EdgeDominatedWarning)
            assert model.fractional_norm(0.0, 0.0, 0.0) == pytest.approx(1.0, rel=1e-6), kind


def test_opmatrix_resolvent_matches_direct_solve():
    model = operators.OperatorMatrixModel(2, 48)
    rng = np.random.default_rng(8)
    x = rng.standard_normal((48, 2)) + 1j * rng.standard_normal((48, 2))
    lam = 2.0 + 0.7j  # outside [0, 1]
    got = model.resolvent_apply(lam, x)
    eye = np.eye(2)
    for i, s in enumerate(model.s_nodes):
        want = np.linalg.solve(lam * eye - (s * eye - model.nilp), x[i])
        assert np.linalg.norm(got[i] - want) <= 1e-12 * np.linalg.norm(want)


def test_opmatrix_norm_growth():
    model = operators.OperatorMatrixModel(3, 64)
    # ||T(t)|| ~ t^{n-1}/ (n-1)! for the nilpotent part
    for t in (50.0, 200.0):
        assert model.semigroup_norm(t) == pytest.approx(t**2 / 2.0, rel=0.01)


def test_opmatrix_rejects_fractional_sigma():
    model = operators.OperatorMatrixModel(2, 32)
    with pytest.raises(DomainError):
        model.fractional_norm(1.0, 0.5, 0.0)


def test_diagonal_edge_domination_flagged():
    model = operators.DiagonalSymbolModel(
        1.0, 0.5, numcore.geometric_grid(1.0 + 1e-6, 1e4, 512)
    )
    # resonance at s = xi^(1/b) = 11025 lies just beyond s_max = 1e4, so the
    # supremum climbs into the truncation edge
    with pytest.warns(EdgeDominatedWarning):
        model.shifted_resolvent_norm(-105.0j)


def test_model_from_config_kinds():
    dense = operators.model_from_config(
        {"kind": "dense-matrix", "entries": [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 0.0], [2.0, 0.0]]]}
    )
    assert dense.info.kind == "dense-matrix" and dense.dim == 2
    assert dense.matrix[0, 1] == 1j
    diag = operators.model_from_config(
        {"kind": "diagonal-symbol", "a": 1.0, "b": 0.5, "grid_count": 64, "s_max": 1e4}
    )
    assert diag.info.kind == "diagonal-symbol" and diag.grid.count == 64
    jor = operators.model_from_config({"kind": "jordan-sum", "gamma": 0.5, "delta": 0.5, "n_max": 100})
    assert jor.info.kind == "jordan-sum" and jor.n_start == 4
    om = operators.model_from_config({"kind": "operator-matrix", "n": 3, "s_count": 64})
    assert om.info.kind == "operator-matrix"
    with pytest.raises(DomainError):
        operators.model_from_config({"kind": "mystery"})


def test_metadata_flags():
    models = _models()
    assert models["dense"].info.sectorial
    assert models["diagonal"].info.sectorial and models["diagonal"].info.invertible
    assert models["jordan"].info.sectorial and models["jordan"].info.injective
    assert not models["opmatrix"].info.sectorial
    assert not models["opmatrix"].info.invertible
    singular = operators.DenseMatrixModel([[1.0, 0.0], [0.0, 0.0]])
    assert not singular.info.injective
