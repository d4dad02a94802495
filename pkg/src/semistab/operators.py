"""Concrete operator models with semigroup, resolvent, and norm actions.

Four model kinds are bundled:

* dense-matrix     -- an arbitrary finite complex matrix;
* diagonal-symbol  -- multiplication by s^(-a) + i s^b on a truncated
                      half-line, with an optional first-derivative
                      (Sobolev-style) norm surrogate;
* jordan-sum       -- a truncated direct sum of shifted nilpotent blocks
                      with block n rotated by -i n;
* operator-matrix  -- a nilpotent perturbation of multiplication by s on
                      (0, 1), realized through its matrix-valued symbol.

Conventions: the semigroup is T(t) = exp(-t A); ``resolvent_apply``
computes (lam - A)^{-1} x; probe norms are reported for (lam + A)^{-1}
because stability analysis probes the closed right half-plane.

All models are immutable after construction and their operations are
pure, so values may be evaluated from several threads at once.
"""

from __future__ import annotations

import cmath
import math
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm as _scipy_expm
from scipy.linalg import svdvals, toeplitz
from scipy.signal import fftconvolve
from scipy.special import gammaln

from .errors import (
    DomainError,
    EdgeDominatedWarning,
    NearSingularityError,
    ShapeError,
    UnsupportedModelError,
)
from .numcore import LogGrid, geometric_grid, sup_on_grid

_SING_TOL = 1e-11


@dataclass(frozen=True)
class ModelInfo:
    """Metadata every model carries."""

    kind: str
    injective: bool
    invertible: bool
    sectorial: bool
    sectorial_angle: float | None
    known_growth_pair: tuple[float, float] | None = None


class OperatorModel(ABC):
    """A concrete operator A with exact or discretized actions."""

    info: ModelInfo

    @abstractmethod
    def semigroup_apply(self, t, x):
        """T(t) x = exp(-t A) x."""

    @abstractmethod
    def resolvent_apply(self, lam, x):
        """(lam - A)^{-1} x.  Raises NearSingularityError close to the spectrum."""

    @abstractmethod
    def spectrum_distance(self, lam):
        """Estimated distance from lam to the spectrum of A."""

    @abstractmethod
    def semigroup_norm(self, t):
        """The operator norm of T(t)."""

    @abstractmethod
    def shifted_resolvent_norm(self, lam):
        """The operator norm of (lam + A)^{-1}."""

    @abstractmethod
    def fractional_norm(self, t, sigma, tau):
        """Norm of T(t) A^sigma (1+A)^{-sigma-tau}, the computable surrogate
        for the norm of T(t) from the smoothness-(sigma, tau) domain to X."""

    @abstractmethod
    def phi_closed_apply(self, alpha, beta, x):
        """Closed-form A^alpha (1+A)^{-alpha-beta} x, where available.

        Raises UnsupportedModelError when no closed form exists; callers
        fall back to contour quadrature.
        """

    @abstractmethod
    def spectral_abscissa_neg(self):
        """s(-A) = sup Re sigma(-A)."""

    def resolvent_apply_many(self, lams, x):
        """Stacked resolvent applications (default: loop)."""
        return [self.resolvent_apply(lam, x) for lam in lams]

    def _check_semigroup_time(self, t):
        if t < 0:
            raise DomainError(f"semigroup time must be >= 0, got {t}")

    def _check_resolvent_point(self, lam):
        d = self.spectrum_distance(lam)
        if d < _SING_TOL:
            raise NearSingularityError(
                f"lambda={lam} lies within {d:.3e} of the spectrum", d
            )
        return d


# ---------------------------------------------------------------------------
# helpers shared by the block-structured models


def _nilpotent(n):
    out = np.zeros((n, n))
    for k in range(n - 1):
        out[k, k + 1] = 1.0
    return out


def _exp_series_coeffs(t, m):
    """Coefficients t^k/k! for k < m, the polynomial exp(t B_m)."""
    if t == 0.0:
        out = np.zeros(m)
        out[0] = 1.0
        return out
    ks = np.arange(m)
    return np.exp(ks * math.log(t) - gammaln(ks + 1))


def _shifted_power_rows(zetas, p, m):
    """Rows of coefficients c_k with (zeta I - B_m)^p = sum_k c_k B_m^k.

    Finite Taylor expansion of z^p (principal branch) around each zeta;
    vectorized over an array of zetas.
    """
    zetas = np.atleast_1d(np.asarray(zetas, dtype=complex))
    out = np.zeros((len(zetas), m), dtype=complex)
    out[:, 0] = zetas**p
    for k in range(1, m):
        out[:, k] = out[:, k - 1] * (-(p - (k - 1))) / (k * zetas)
    return out


def _upper_toeplitz(coeffs):
    col = np.zeros(len(coeffs), dtype=complex)
    col[0] = coeffs[0]
    return toeplitz(col, coeffs)


def _toeplitz_norm(coeffs):
    return float(svdvals(_upper_toeplitz(coeffs))[0])


def _apply_series(coeffs, x):
    """y_i = sum_k coeffs[k] * x[i+k], i.e. (sum_k coeffs[k] B^k) x."""
    m = len(x)
    y = np.zeros(m, dtype=complex)
    for k, c in enumerate(coeffs):
        if c == 0.0:
            continue
        y[: m - k] += c * x[k:]
    return y


# ---------------------------------------------------------------------------
# dense matrices


class DenseMatrixModel(OperatorModel):
    """A on C^n given by an explicit matrix; everything is exact linear algebra."""

    def __init__(self, entries):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DomainError(f"matrix must be square and nonempty, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DomainError("matrix entries must be finite")
        self.matrix = a
        self.dim = a.shape[0]
        self._eigvals, self._eigvecs = np.linalg.eig(a)
        try:
            self._eigvecs_inv = np.linalg.inv(self._eigvecs)
            resid = self._eigvecs @ np.diag(self._eigvals) @ self._eigvecs_inv - a
            scale = max(1.0, float(np.linalg.norm(a, 2)))
            self._diagonalizable = float(np.linalg.norm(resid, 2)) / scale < 1e-9
        except np.linalg.LinAlgError:
            self._eigvecs_inv = None
            self._diagonalizable = False
        injective = bool(np.min(np.abs(self._eigvals)) > 0.0)
        on_neg_axis = np.any(
            (self._eigvals.real <= 0.0) & (np.abs(self._eigvals.imag) < 1e-14)
        )
        angle = float(np.max(np.abs(np.angle(self._eigvals)))) if injective else None
        sectorial = injective and not bool(on_neg_axis)
        self.info = ModelInfo(
            kind="dense-matrix",
            injective=injective,
            invertible=injective,
            sectorial=sectorial,
            sectorial_angle=angle if sectorial else None,
        )

    # -- state-space plumbing

    def _check_vec(self, x):
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim,):
            raise ShapeError(f"expected vector of shape ({self.dim},), got {x.shape}")
        return x

    def _expm_neg(self, t):
        """exp(-t A); eigen route when safely diagonalizable, else Pade."""
        if self._diagonalizable:
            return (self._eigvecs * np.exp(-t * self._eigvals)) @ self._eigvecs_inv
        return _scipy_expm(-t * self.matrix)

    # -- operations

    def semigroup_apply(self, t, x):
        self._check_semigroup_time(t)
        x = self._check_vec(x)
        return self._expm_neg(t) @ x

    def resolvent_apply(self, lam, x):
        x = self._check_vec(x)
        self._check_resolvent_point(lam)
        return np.linalg.solve(lam * np.eye(self.dim) - self.matrix, x)

    def resolvent_apply_many(self, lams, x):
        x = self._check_vec(x)
        lams = np.asarray(lams, dtype=complex)
        mats = lams[:, None, None] * np.eye(self.dim)[None] - self.matrix[None]
        rhs = np.broadcast_to(x[None, :, None], (len(lams), self.dim, 1)).copy()
        return np.linalg.solve(mats, rhs)[:, :, 0]

    def spectrum_distance(self, lam):
        return float(np.min(np.abs(lam - self._eigvals)))

    def semigroup_norm(self, t):
        self._check_semigroup_time(t)
        return float(np.linalg.norm(self._expm_neg(t), 2))

    def shifted_resolvent_norm(self, lam):
        d = self.spectrum_distance(-lam)
        if d < _SING_TOL:
            raise NearSingularityError(
                f"-lambda={-lam} lies within {d:.3e} of the spectrum", d
            )
        return 1.0 / float(svdvals(lam * np.eye(self.dim) + self.matrix)[-1])

    def phi_matrix(self, alpha, beta):
        """A^alpha (1+A)^{-alpha-beta} as a dense matrix."""
        if alpha < 0 or beta < 0:
            raise DomainError("fractional indices must be >= 0")
        if alpha > 0 and not self.info.injective:
            raise DomainError("positive power of a non-injective matrix")
        eye = np.eye(self.dim)
        if float(alpha).is_integer() and float(alpha + beta).is_integer():
            num = np.linalg.matrix_power(self.matrix, int(alpha))
            den = np.linalg.matrix_power(np.linalg.inv(eye + self.matrix), int(alpha + beta))
            return num @ den
        if self._diagonalizable:
            mu = self._eigvals
            diag = mu**alpha * (1.0 + mu) ** (-(alpha + beta))
            return (self._eigvecs * diag) @ self._eigvecs_inv
        raise UnsupportedModelError(
            "non-integer fractional power of a defective matrix has no closed "
            "form here; use contour quadrature"
        )

    def phi_closed_apply(self, alpha, beta, x):
        x = self._check_vec(x)
        return self.phi_matrix(alpha, beta) @ x

    def fractional_norm(self, t, sigma, tau):
        self._check_semigroup_time(t)
        return float(np.linalg.norm(self._expm_neg(t) @ self.phi_matrix(sigma, tau), 2))

    def spectral_abscissa_neg(self):
        return float(-np.min(self._eigvals.real))


# ---------------------------------------------------------------------------
# diagonal multiplication symbols on a truncated half-line


class DiagonalSymbolModel(OperatorModel):
    """Multiplication by s^(-a) + i s^b on (1, s_max], sampled geometrically.

    With ``sobolev=True`` operator norms use the first-order surrogate
    max(sup |g|, sup |g'|), which reproduces the multiplication-operator
    norm on the Sobolev space up to two-sided constants; otherwise plain
    sup |g|.  Suprema are grid maxima refined by golden section, and a
    supremum attained at the s_max edge raises EdgeDominatedWarning.
    """

    def __init__(self, a, b, grid=None, sobolev=True):
        if not (a > 0.0):
            raise DomainError(f"need a > 0, got {a}")
        if not (0.0 < b < 1.0):
            raise DomainError(f"need b in (0,1), got {b}")
        if a + b < 1.0:
            raise DomainError(f"need a + b >= 1, got {a + b}")
        if grid is None:
            grid = geometric_grid(1.0 + 1e-6, 1e8, 4096)
        if not isinstance(grid, LogGrid):
            raise DomainError("grid must be a LogGrid")
        if grid.start <= 1.0:
            raise DomainError(f"grid must start above 1, got {grid.start}")
        self.a = float(a)
        self.b = float(b)
        self.grid = grid
        self.sobolev = bool(sobolev)
        angle = float(np.max(np.abs(np.angle(self.symbol(grid.nodes)))))
        self.info = ModelInfo(
            kind="diagonal-symbol",
            injective=True,
            invertible=True,
            sectorial=True,
            sectorial_angle=angle,
            known_growth_pair=(0.0, (b - 1.0 + 2.0 * a) / b),
        )

    def symbol(self, s):
        return s ** (-self.a) + 1j * s**self.b

    def symbol_derivative(self, s):
        return -self.a * s ** (-self.a - 1.0) + 1j * self.b * s ** (self.b - 1.0)

    def _check_vec(self, x):
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.grid.count,):
            raise ShapeError(f"expected vector of shape ({self.grid.count},), got {x.shape}")
        return x

    def _sup_norm(self, g, gprime, label):
        val = sup_on_grid(lambda s: np.abs(g(s)), self.grid.nodes, label=label)
        if not self.sobolev:
            return val
        dval = sup_on_grid(lambda s: np.abs(gprime(s)), self.grid.nodes, label=label + "'")
        return max(val, dval)

    # -- operations

    def semigroup_apply(self, t, x):
        self._check_semigroup_time(t)
        x = self._check_vec(x)
        return x * np.exp(-t * self.symbol(self.grid.nodes))

    def resolvent_apply(self, lam, x):
        x = self._check_vec(x)
        self._check_resolvent_point(lam)
        return x / (lam - self.symbol(self.grid.nodes))

    def resolvent_apply_many(self, lams, x):
        x = self._check_vec(x)
        lams = np.asarray(lams, dtype=complex)
        ph = self.symbol(self.grid.nodes)
        return x[None, :] / (lams[:, None] - ph[None, :])

    def spectrum_distance(self, lam):
        return float(np.min(np.abs(lam - self.symbol(self.grid.nodes))))

    def semigroup_norm(self, t):
        self._check_semigroup_time(t)
        return self.fractional_norm(t, 0.0, 0.0)

    def shifted_resolvent_norm(self, lam):
        d = float(np.min(np.abs(-lam - self.symbol(self.grid.nodes))))
        if d < _SING_TOL:
            raise NearSingularityError(
                f"-lambda={-lam} lies within {d:.3e} of the symbol range", d
            )

        def g(s):
            return 1.0 / (lam + self.symbol(s))

        def gp(s):
            return -self.symbol_derivative(s) / (lam + self.symbol(s)) ** 2

        return self._sup_norm(g, gp, "resolvent symbol")

    def fractional_norm(self, t, sigma, tau):
        self._check_semigroup_time(t)
        if sigma < 0 or tau < 0:
            raise DomainError("fractional indices must be >= 0")

        def g(s):
            ph = self.symbol(s)
            out = np.exp(-t * ph)
            if sigma:
                out = out * ph**sigma
            if sigma or tau:
                out = out * (1.0 + ph) ** (-(sigma + tau))
            return out

        def gp(s):
            ph = self.symbol(s)
            dph = self.symbol_derivative(s)
            factor = -t * dph - (sigma + tau) * dph / (1.0 + ph)
            if sigma:
                factor = factor + sigma * dph / ph
            return g(s) * factor

        return self._sup_norm(g, gp, f"T(t)Phi^{sigma}_{tau} symbol")

    def phi_closed_apply(self, alpha, beta, x):
        x = self._check_vec(x)
        ph = self.symbol(self.grid.nodes)
        return x * ph**alpha * (1.0 + ph) ** (-(alpha + beta))

    def spectral_abscissa_neg(self):
        # sup of -Re(symbol) over the untruncated half-line is 0 (s -> oo).
        return 0.0


# ---------------------------------------------------------------------------
# direct sums of shifted Jordan blocks


class JordanSumModel(OperatorModel):
    """Truncated direct sum over n of (-i n + gamma - B_{m(n)}).

    Block n acts on an m(n)-dimensional space with m(n) = floor(log n /
    log(1/delta)); blocks with m(n) < 2 are dropped, and the sum runs up
    to the truncation index ``n_max``.  Vectors are dicts mapping block
    index to a coefficient array; the direct sum is an l2 sum, so
    operator norms are block-wise suprema.

    Norm suprema over the ~n_max blocks are computed by screening: the
    coefficient rows of each block's upper-triangular Toeplitz symbol
    give an l1 upper and an l2 lower bound that bracket the spectral norm
    within sqrt(block size); only surviving candidates are sent to an
    exact singular-value computation.
    """

    def __init__(self, gamma, delta, n_max=10**4, n_start=None):
        if not (0.0 < gamma < 1.0):
            raise DomainError(f"need gamma in (0,1), got {gamma}")
        if not (0.0 < delta < 1.0):
            raise DomainError(f"need delta in (0,1), got {delta}")
        self.gamma = float(gamma)
        self.delta = float(delta)
        self.n_max = int(n_max)
        n0 = 2 if n_start is None else int(n_start)
        while self.block_size(n0) < 2:
            n0 += 1
        if n0 > self.n_max:
            raise DomainError("truncation n_max retains no block with m(n) >= 2")
        if self.block_size(n0) < 2:
            raise DomainError("n_start retains a block with m < 2")
        self.n_start = n0
        self._groups = self._build_groups()
        angle = math.atan2(self.n_max, self.gamma)
        self.info = ModelInfo(
            kind="jordan-sum",
            injective=True,
            invertible=True,
            sectorial=True,
            sectorial_angle=angle,
            known_growth_pair=(0.0, math.log(1.0 / gamma) / math.log(1.0 / delta)),
        )

    def block_size(self, n):
        return int(math.floor(math.log(n) / math.log(1.0 / self.delta)))

    def _build_groups(self):
        out = []
        cur_m = self.block_size(self.n_start)
        start = self.n_start
        for k in range(self.n_start + 1, self.n_max + 1):
            m = self.block_size(k)
            if m != cur_m:
                out.append((cur_m, start, k - 1))
                cur_m, start = m, k
        out.append((cur_m, start, self.n_max))
        return out

    @property
    def groups(self):
        """List of (block size m, first n, last n) with constant m."""
        return list(self._groups)

    def eigenvalue(self, n):
        return complex(self.gamma, -float(n))

    def _check_vec(self, x):
        if not isinstance(x, dict) or not x:
            raise ShapeError("jordan-sum vectors are nonempty dicts {block n: coefficients}")
        out = {}
        for n, v in x.items():
            n = int(n)
            if not (self.n_start <= n <= self.n_max):
                raise ShapeError(f"block {n} outside retained range [{self.n_start}, {self.n_max}]")
            v = np.asarray(v, dtype=complex)
            m = self.block_size(n)
            if v.shape != (m,):
                raise ShapeError(f"block {n} expects shape ({m},), got {v.shape}")
            out[n] = v
        return out

    def basis_vector(self, n, index=-1):
        """Unit coordinate vector in block n (default: last coordinate)."""
        m = self.block_size(n)
        v = np.zeros(m, dtype=complex)
        v[index] = 1.0
        return {int(n): v}

    @staticmethod
    def norm(x):
        return math.sqrt(sum(float(np.vdot(v, v).real) for v in x.values()))

    # -- operations

    def semigroup_apply(self, t, x):
        self._check_semigroup_time(t)
        x = self._check_vec(x)
        out = {}
        for n, v in x.items():
            m = len(v)
            coeffs = _exp_series_coeffs(t, m) * cmath.exp(t * complex(0.0, n) - t * self.gamma)
            out[n] = _apply_series(coeffs, v)
        return out

    def resolvent_apply(self, lam, x):
        x = self._check_vec(x)
        self._check_resolvent_point(lam)
        out = {}
        for n, v in x.items():
            m = len(v)
            w = lam - self.eigenvalue(n)
            ks = np.arange(m)
            coeffs = (-1.0) ** ks * w ** (-(ks + 1.0))
            out[n] = _apply_series(coeffs, v)
        return out

    def spectrum_distance(self, lam):
        lam = complex(lam)
        n_near = int(np.clip(round(-lam.imag), self.n_start, self.n_max))
        cands = [n for n in (n_near - 1, n_near, n_near + 1) if self.n_start <= n <= self.n_max]
        return min(abs(lam - self.eigenvalue(n)) for n in cands)

    def semigroup_norm(self, t):
        self._check_semigroup_time(t)
        m = self._groups[-1][0]
        # exp(t B_m) norms are nondecreasing in m, so the largest block decides
        return math.exp(-self.gamma * t) * _toeplitz_norm(
            _exp_series_coeffs(t, m).astype(complex)
        )

    def _sup_over_blocks(self, rows_per_group, label):
        """Exact sup of block norms given per-group coefficient rows.

        rows_per_group: list of (ns, rows) where rows[i] holds the
        Toeplitz coefficients of block ns[i].
        """
        lmax = 0.0
        lmax_arg = None
        for ns, rows in rows_per_group:
            l2 = np.linalg.norm(rows, axis=1)
            i = int(np.argmax(l2))
            if l2[i] > lmax:
                lmax, lmax_arg = float(l2[i]), (ns, rows, i)
        best = 0.0
        best_n = None
        if lmax_arg is not None:
            ns, rows, i = lmax_arg
            best = _toeplitz_norm(rows[i])
            best_n = int(ns[i])
        for ns, rows in rows_per_group:
            u1 = np.abs(rows).sum(axis=1)
            order = np.argsort(u1)[::-1]
            for i in order:
                if u1[i] <= best:
                    break
                val = _toeplitz_norm(rows[i])
                if val > best:
                    best, best_n = val, int(ns[i])
        if best_n is not None and best_n == self.n_max:
            warnings.warn(
                f"supremum of {label} attained at the truncation block n={self.n_max}; "
                "value is a lower estimate",
                EdgeDominatedWarning,
                stacklevel=3,
            )
        return best

    def shifted_resolvent_norm(self, lam):
        d = min(
            abs(-lam - self.eigenvalue(n))
            for n in self._near_blocks(complex(-lam))
        )
        if d < _SING_TOL:
            raise NearSingularityError(
                f"-lambda={-lam} lies within {d:.3e} of the spectrum", d
            )
        rows_per_group = []
        for m, a, b in self._groups:
            ns = np.arange(a, b + 1)
            w = lam - 1j * ns.astype(float) + self.gamma
            ks = np.arange(m)
            rows = w[:, None] ** (-(ks[None, :] + 1.0))
            rows_per_group.append((ns, rows))
        return self._sup_over_blocks(rows_per_group, f"(lam+A)^-1 at lam={lam}")

    def _near_blocks(self, lam):
        n_near = int(np.clip(round(-lam.imag), self.n_start, self.n_max))
        return [n for n in (n_near - 1, n_near, n_near + 1) if self.n_start <= n <= self.n_max]

    def fractional_norm(self, t, sigma, tau):
        self._check_semigroup_time(t)
        if sigma < 0 or tau < 0:
            raise DomainError("fractional indices must be >= 0")
        if sigma == 0 and tau == 0:
            return self.semigroup_norm(t)
        scale = math.exp(-self.gamma * t)
        rows_per_group = []
        for m, a, b in self._groups:
            ns = np.arange(a, b + 1).astype(float)
            rows = _shifted_power_rows(1.0 + self.gamma - 1j * ns, -(sigma + tau), m)
            if sigma:
                num = _shifted_power_rows(self.gamma - 1j * ns, float(sigma), m)
                rows = fftconvolve(rows, num, axes=1)[:, :m]
            ecf = _exp_series_coeffs(t, m)
            rows = fftconvolve(rows, ecf[None, :], axes=1)[:, :m]
            rows_per_group.append((np.arange(a, b + 1), rows))
        return scale * self._sup_over_blocks(
            rows_per_group, f"T({t})Phi^{sigma}_{tau}"
        )

    def phi_closed_apply(self, alpha, beta, x):
        x = self._check_vec(x)
        out = {}
        for n, v in x.items():
            m = len(v)
            coeffs = _shifted_power_rows(1.0 + self.gamma - 1j * n, -(alpha + beta), m)[0]
            if alpha:
                num = _shifted_power_rows(self.gamma - 1j * n, float(alpha), m)[0]
                coeffs = np.convolve(coeffs, num)[:m]
            out[n] = _apply_series(coeffs, v)
        return out

    def spectral_abscissa_neg(self):
        return -self.gamma


# ---------------------------------------------------------------------------
# operator matrices: multiplication by s minus a nilpotent shift


class OperatorMatrixModel(OperatorModel):
    """A = (mult by s) I - N on n copies of L^2(0,1), N the unit upper shift.

    The operator acts through its n x n matrix symbol M(s) = s I - N, so
    norms are suprema over s in (0,1) of pointwise spectral norms; the
    suprema are seeded at the analytic critical points s* = min(1, c/t) of
    the one-bump objectives exp(-t s) s^c and refined by golden section.
    State vectors are samples of the n components on an interior grid.
    Not sectorial: the resolvent blows up like |lam|^{-n} at the origin.
    """

    def __init__(self, n, s_count=1024):
        if n < 2:
            raise DomainError(f"need nilpotency size n >= 2, got {n}")
        self.n = int(n)
        self.s_count = int(s_count)
        self.s_nodes = (np.arange(self.s_count) + 0.5) / self.s_count
        self.nilp = _nilpotent(self.n)
        self._sup_nodes = np.geomspace(1e-9, 1.0, 384)
        self.info = ModelInfo(
            kind="operator-matrix",
            injective=True,
            invertible=False,
            sectorial=False,
            sectorial_angle=None,
            known_growth_pair=(float(n), 0.0),
        )

    def _check_vec(self, x):
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.s_count, self.n):
            raise ShapeError(
                f"expected samples of shape ({self.s_count}, {self.n}), got {x.shape}"
            )
        return x

    def _expm_tN(self, t):
        out = np.eye(self.n)
        p = np.eye(self.n)
        for k in range(1, self.n):
            p = p @ (t * self.nilp) / k
            out = out + p
        return out

    def symbol_semigroup(self, t, s):
        """T(t)(s) = exp(-t s) exp(t N) for scalar s."""
        return math.exp(-t * s) * self._expm_tN(t)

    def symbol_phi(self, alpha, beta, s):
        """Phi^alpha_beta symbol at s; alpha must be a nonnegative integer."""
        if alpha < 0 or beta < 0:
            raise DomainError("fractional indices must be >= 0")
        if not float(alpha).is_integer():
            raise DomainError(
                "operator-matrix models support integer smoothing powers only "
                "(fractional powers are unbounded at the spectral origin)"
            )
        base = np.linalg.matrix_power(s * np.eye(self.n) - self.nilp, int(alpha))
        rows = _shifted_power_rows(np.array([1.0 + s]), -(alpha + beta), self.n)[0]
        den = sum(c * np.linalg.matrix_power(self.nilp, k) for k, c in enumerate(rows))
        return base @ den

    # -- operations

    def semigroup_apply(self, t, x):
        self._check_semigroup_time(t)
        x = self._check_vec(x)
        e = self._expm_tN(t)
        return np.exp(-t * self.s_nodes)[:, None] * (x @ e.T)

    def resolvent_apply(self, lam, x):
        x = self._check_vec(x)
        self._check_resolvent_point(lam)
        # ((lam - s) I + N)^{-1} = sum_k (-N)^k (lam - s)^{-k-1}
        out = np.zeros_like(x)
        shifted = x.copy()
        denom = lam - self.s_nodes
        for k in range(self.n):
            out += ((-1.0) ** k) * shifted * (denom ** (-(k + 1)))[:, None]
            shifted = shifted @ self.nilp.T
        return out

    def spectrum_distance(self, lam):
        lam = complex(lam)
        dx = 0.0 if 0.0 <= lam.real <= 1.0 else min(abs(lam.real), abs(lam.real - 1.0))
        return math.hypot(dx, lam.imag)

    def _sup_symbol_norm(self, mat_at, extra_nodes=()):
        def f(ss):
            return np.array([float(np.linalg.norm(mat_at(s), 2)) for s in np.atleast_1d(ss)])

        nodes = self._sup_nodes
        if len(extra_nodes):
            nodes = np.unique(np.concatenate([nodes, np.asarray(extra_nodes, dtype=float)]))
        return sup_on_grid(f, nodes, warn_edges=())

    def semigroup_norm(self, t):
        self._check_semigroup_time(t)
        e = self._expm_tN(t)
        seeds = [min(1.0, max(1e-9, c / t)) if t > 0 else 0.5 for c in range(self.n)]
        return self._sup_symbol_norm(lambda s: math.exp(-t * s) * e, seeds)

    def shifted_resolvent_norm(self, lam):
        d = self.spectrum_distance(-lam)
        if d < _SING_TOL:
            raise NearSingularityError(
                f"-lambda={-lam} lies within {d:.3e} of [0,1]", d
            )

        def mat(s):
            out = np.zeros((self.n, self.n), dtype=complex)
            p = np.eye(self.n)
            for k in range(self.n):
                out += p * (lam + s) ** (-(k + 1))
                p = p @ self.nilp
            return out

        return self._sup_symbol_norm(mat)

    def fractional_norm(self, t, sigma, tau):
        self._check_semigroup_time(t)
        e = self._expm_tN(t)
        seeds = [min(1.0, max(1e-9, c / t)) if t > 0 else 0.5 for c in range(2 * self.n)]
        return self._sup_symbol_norm(
            lambda s: math.exp(-t * s) * e @ self.symbol_phi(sigma, tau, s), seeds
        )

    def phi_closed_apply(self, alpha, beta, x):
        x = self._check_vec(x)
        out = np.empty_like(x)
        for i, s in enumerate(self.s_nodes):
            out[i] = self.symbol_phi(alpha, beta, float(s)) @ x[i]
        return out

    def spectral_abscissa_neg(self):
        return 0.0


# ---------------------------------------------------------------------------
# config ingestion (the CLI's tagged union)


def model_from_config(spec):
    """Build a model from the JSON-config operator description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("operator config must be a dict with a 'kind' tag")
    kind = spec["kind"]
    if kind == "dense-matrix":
        entries = spec["entries"]
        arr = np.asarray(
            [[complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e) for e in row] for row in entries]
        )
        return DenseMatrixModel(arr)
    if kind == "diagonal-symbol":
        grid = geometric_grid(
            spec.get("s_start", 1.0 + 1e-6),
            spec.get("s_max", 1e8),
            spec.get("grid_count", 4096),
        )
        return DiagonalSymbolModel(spec["a"], spec["b"], grid, spec.get("sobolev", True))
    if kind == "jordan-sum":
        return JordanSumModel(
            spec["gamma"], spec["delta"], spec.get("n_max", 10**4), spec.get("n_start")
        )
    if kind == "operator-matrix":
        return OperatorMatrixModel(spec["n"], spec.get("s_count", 1024))
    raise DomainError(f"unknown operator kind {kind!r}")
