"""Decay measurement on fractional domains and guaranteed-rate calculators.

The calculators turn a resolvent-growth pair (alpha, beta), smoothing
indices (sigma, tau), and space-geometry parameters into guaranteed decay
exponents rho with their applicability conditions.  Throughout, the
divisions (sigma+1)/alpha etc. use the conventions 1/0 = oo and 0/0 = oo,
so the exponential regime appears as rho = oo and is distinct from "no
rate" (a failed hypothesis).

Geometry parameters are user inputs and are never inferred; hypotheses
the artifact cannot check numerically (R-boundedness of the tempered
resolvent family, a negative non-analytic growth bound) enter as asserted
flags and are recorded as such in the condition ledger of each prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numcore import ExpRateFit, LogGrid, PowerFit, fit_exp_rate, fit_power_law

INF = math.inf


def _div(num, den):
    """num/den with the 1/0 = 0/0 = oo convention (num, den >= 0)."""
    if den == 0.0:
        return INF
    return num / den


@dataclass(frozen=True)
class GeometryDescriptor:
    """User-supplied geometric data of the underlying space."""

    hilbert: bool = False
    fourier_type: float | None = None
    type_p: float | None = None
    cotype_q: float | None = None
    lattice: tuple[float, float] | None = None  # (p-convex, q-concave)
    positive_semigroup: bool = False
    r_resolvent_growth_asserted: bool = False
    zeta_negative_asserted: bool = False

    def __post_init__(self):
        if self.hilbert:
            object.__setattr__(self, "fourier_type", 2.0)
            object.__setattr__(self, "type_p", 2.0)
            object.__setattr__(self, "cotype_q", 2.0)
            object.__setattr__(self, "r_resolvent_growth_asserted", True)
        if self.fourier_type is not None and not (1.0 <= self.fourier_type <= 2.0):
            raise DomainError(f"Fourier type must lie in [1,2], got {self.fourier_type}")
        if self.type_p is not None and not (1.0 <= self.type_p <= 2.0):
            raise DomainError(f"type must lie in [1,2], got {self.type_p}")
        if self.cotype_q is not None and not (2.0 <= self.cotype_q):
            raise DomainError(f"cotype must lie in [2,oo], got {self.cotype_q}")
        if self.lattice is not None:
            pc, qc = self.lattice
            if not (1.0 <= pc <= 2.0 and 2.0 <= qc < INF):
                raise DomainError(f"lattice convexity pair out of range: {self.lattice}")


def conjugate_exponent(p):
    """Hoelder conjugate with the endpoint conventions 1' = oo, oo' = 1."""
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class RatePrediction:
    """A guaranteed decay exponent with its source and hypotheses.

    ``rho`` is None when a hypothesis fails ("no rate"); math.inf encodes
    the exponential regime.  ``strict`` records whether the exponent is an
    open supremum (every rho' < rho is guaranteed) or attained.
    """

    rho: float | None
    strict: bool
    r_index: float  # the smoothing index 1/r demanded by the source theorem
    source: str
    conditions: tuple[Condition, ...] = ()
    log_factor: bool = False

    @property
    def applicable(self):
        return all(c.passed for c in self.conditions)


def _prediction(source, conds, rho, strict, r_index, log_factor=False):
    if not all(c.passed for c in conds):
        return RatePrediction(None, strict, r_index, source, tuple(conds), log_factor)
    return RatePrediction(float(rho), strict, r_index, source, tuple(conds), log_factor)


def predict_rate_general(alpha, beta, sigma, tau):
    """Rate on a general Banach space: rho < min((sigma+1)/alpha - 1,
    (tau-1)/beta - 1) under sigma > alpha - 1 and tau > beta + 1."""
    conds = [
        Condition("sigma > alpha - 1", sigma > alpha - 1.0, f"sigma={sigma}, alpha={alpha}"),
        Condition("tau > beta + 1", tau > beta + 1.0, f"tau={tau}, beta={beta}"),
    ]
    rho = min(_div(sigma + 1.0, alpha) - 1.0, _div(tau - 1.0, beta) - 1.0)
    return _prediction("general-banach", conds, rho, True, 1.0)


def predict_rate_fourier_type(alpha, beta, sigma, tau, geometry):
    """Rate under a Fourier-type hypothesis; the Hilbert branch (p = 2)
    allows tau >= beta with the beta-branch exponent attained."""
    p = geometry.fourier_type
    if p is None:
        raise DomainError("geometry.fourier_type is required")
    r_index = 2.0 / p - 1.0  # 1/r = 1/p - 1/p'
    if p == 2.0:
        conds = [
            Condition("sigma > alpha - 1", sigma > alpha - 1.0),
            Condition("tau >= beta", tau >= beta),
        ]
        branch_a = _div(sigma + 1.0, alpha) - 1.0
        branch_b = _div(tau, beta) - 1.0
        rho = min(branch_a, branch_b)
        strict = branch_a < branch_b  # the beta branch is attained
        return _prediction("fourier-type-hilbert", conds, rho, strict, 0.0)
    conds = [
        Condition("sigma > alpha - 1", sigma > alpha - 1.0),
        Condition("tau > beta + 1/r", tau > beta + r_index, f"1/r={r_index}"),
    ]
    rho = min(_div(sigma + 1.0, alpha) - 1.0, _div(tau - r_index, beta) - 1.0)
    return _prediction("fourier-type", conds, rho, True, r_index)


def predict_rate_type_cotype(alpha, beta, sigma, tau, geometry):
    """Rate under type/cotype (and optionally lattice-convexity) data;
    requires the R-resolvent-growth hypothesis as an asserted flag."""
    p, q = geometry.type_p, geometry.cotype_q
    if p is None or q is None:
        raise DomainError("geometry.type_p and geometry.cotype_q are required")
    asserted = Condition(
        "R-resolvent growth asserted",
        geometry.r_resolvent_growth_asserted,
        "cannot be verified numerically; user assertion",
    )
    if p == 2.0 and q == 2.0:
        hil = predict_rate_fourier_type(
            alpha, beta, sigma, tau, GeometryDescriptor(hilbert=True)
        )
        conds = (asserted,) + hil.conditions
        return _prediction("type-cotype-hilbert", list(conds), hil.rho, hil.strict, 0.0)
    r_index = 1.0 / p - (0.0 if q == INF else 1.0 / q)
    best = None
    conds = [
        asserted,
        Condition("sigma > alpha - 1", sigma > alpha - 1.0),
        Condition("tau > beta + 1/r", tau > beta + r_index, f"1/r={r_index}"),
    ]
    rho = min(_div(sigma + 1.0, alpha) - 1.0, _div(tau - r_index, beta) - 1.0)
    best = _prediction("type-cotype", conds, rho, True, r_index)
    if geometry.lattice is not None:
        pc, qc = geometry.lattice
        r_lat = 1.0 / pc - 1.0 / qc
        conds_lat = [
            asserted,
            Condition("sigma > alpha - 1", sigma > alpha - 1.0),
            Condition("tau >= beta + 1/r", tau >= beta + r_lat, f"1/r={r_lat}"),
        ]
        branch_a = _div(sigma + 1.0, alpha) - 1.0
        branch_b = _div(tau - r_lat, beta) - 1.0
        lat = _prediction(
            "type-cotype-lattice", conds_lat, min(branch_a, branch_b),
            branch_a < branch_b, r_lat,
        )
        if lat.applicable and (not best.applicable or lat.rho >= best.rho):
            best = lat
    return best


def predict_rate_asymptotically_analytic(alpha, sigma, geometry=None, zeta_negative_asserted=None):
    """tau-free rate rho < (sigma+1)/alpha - 1 for asymptotically analytic
    semigroups (negative non-analytic growth bound, asserted)."""
    if zeta_negative_asserted is None:
        zeta_negative_asserted = bool(geometry and geometry.zeta_negative_asserted)
    conds = [
        Condition(
            "non-analytic growth bound < 0 asserted",
            bool(zeta_negative_asserted),
            "cannot be verified numerically; user assertion",
        ),
        Condition("sigma > alpha - 1", sigma > alpha - 1.0),
    ]
    rho = _div(sigma + 1.0, alpha) - 1.0
    return _prediction("asymptotically-analytic", conds, rho, True, 0.0)


@dataclass(frozen=True)
class GrowthAwareRates:
    """Both growth-aware candidates with the stronger one marked."""

    plain: RatePrediction
    scaling: RatePrediction | None
    stronger: str  # "plain" or "scaling"


def predict_rate_growth_aware(alpha, beta, sigma, tau, mu):
    """Rates that discount the measured growth exponent mu of ||T(t)||.

    The plain candidate is min(sigma/alpha, tau/beta) - mu (strict); for
    alpha = 0 a rescaling of the bounded-semigroup literature gives
    tau/beta - mu with a logarithmic factor.  Negative net exponents are
    reported as failed conditions, not as rates.
    """
    if mu < 0:
        raise DomainError(f"need mu >= 0, got {mu}")
    raw = min(_div(sigma, alpha), _div(tau, beta))
    net = raw - mu if raw != INF else INF
    conds = [Condition("net exponent >= 0", net >= 0.0, f"min(s/a,t/b)-mu={net}")]
    plain = _prediction("growth-aware", conds, net, True, 1.0)
    scaling = None
    if alpha == 0.0:
        raw_s = _div(tau, beta)
        net_s = raw_s - mu if raw_s != INF else INF
        conds_s = [Condition("net exponent >= 0", net_s >= 0.0, f"t/b-mu={net_s}")]
        scaling = _prediction("growth-aware-scaling", conds_s, net_s, False, 1.0, log_factor=True)
    stronger = "plain"
    if scaling is not None and scaling.applicable:
        if not plain.applicable:
            stronger = "scaling"
        elif scaling.rho > plain.rho or (scaling.rho == plain.rho and not scaling.strict):
            stronger = "scaling"
    return GrowthAwareRates(plain, scaling, stronger)


def interpolate_rates(rate1, rate2, theta):
    """Combine two decay rates (sigma, tau, rho) by interpolation.

    For theta in [0,1] the exponent at the convex combination of indices
    interpolates linearly; for theta >= 1 the first rate must be a pure
    power law and scales to (theta*sigma1, theta*tau1) with exponent
    theta*rho1.  Returns (sigma, tau, exponent).
    """
    s1, t1, r1 = rate1
    s2, t2, r2 = rate2
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    if theta <= 1.0:
        if s1 < s2 or t1 < t2:
            raise DomainError(
                "interpolation needs sigma1 >= sigma2 and tau1 >= tau2, got "
                f"({s1},{t1}) vs ({s2},{t2})"
            )
        return (
            theta * s1 + (1.0 - theta) * s2,
            theta * t1 + (1.0 - theta) * t2,
            theta * r1 + (1.0 - theta) * r2,
        )
    return (theta * s1, theta * t1, theta * r1)


@dataclass(frozen=True)
class SmoothnessIndex:
    value: float
    source: str


def exponential_smoothness_index(geometry):
    """Smallest fractional-domain index at which the applicable spectral
    bound controls exponential decay of orbits, with its source."""
    candidates = []
    if geometry.hilbert:
        candidates.append((0.0, "hilbert"))
    if geometry.fourier_type is not None:
        p = geometry.fourier_type
        candidates.append((1.0 / p - 1.0 / conjugate_exponent(p), "fourier-type"))
    if geometry.type_p is not None and geometry.cotype_q is not None:
        p, q = geometry.type_p, geometry.cotype_q
        inv_q = 0.0 if q == INF else 1.0 / q
        if geometry.r_resolvent_growth_asserted:
            candidates.append((1.0 / p - inv_q, "type-cotype"))
        candidates.append((2.0 / p - 2.0 * inv_q, "type-cotype-unconditional"))
    if geometry.lattice is not None and geometry.positive_semigroup:
        pc, qc = geometry.lattice
        candidates.append((1.0 / pc - 1.0 / qc, "positive-lattice"))
    if not candidates:
        raise DomainError("geometry carries no usable parameters")
    value, source = min(candidates, key=lambda c: c[0])
    return SmoothnessIndex(value, source)


# ---------------------------------------------------------------------------
# measurements


@dataclass(frozen=True)
class DecayMeasurement:
    """Measured norms of T(t) from a fractional domain to X with fits."""

    sigma: float
    tau: float
    t_grid: LogGrid
    norms: np.ndarray
    fit: PowerFit
    rho_hat: float  # decay reported as a positive exponent
    exp_fit: ExpRateFit
    super_polynomial: bool
    growth_mu_hat: float | None = None


def _classify_super_polynomial(power_fit, exp_fit):
    """Exponential orbits: the exponential fit is much better in log space
    and has a genuinely negative rate."""
    return (
        exp_fit.rate < -1e-8
        and power_fit.residual > 0.1
        and exp_fit.residual < 0.25 * power_fit.residual
    )


def measure_decay(model, sigma, tau, t_grid, window=None, with_growth=False):
    """Norms of T(t) Phi^sigma_tau(A) over the grid with a power-law fit.

    ``rho_hat`` is the fitted decay exponent (positive = decay).  With
    ``with_growth`` the growth exponent of ||T(t)|| on X is fitted over
    the same window for the growth-aware predictors.
    """
    norms = np.array([model.fractional_norm(t, sigma, tau) for t in t_grid.nodes])
    fit = fit_power_law(t_grid, norms, window=window)
    exp_fit = fit_exp_rate(t_grid.nodes, norms, window=window)
    growth = None
    if with_growth:
        gnorms = np.array([model.semigroup_norm(t) for t in t_grid.nodes])
        growth = fit_power_law(t_grid, gnorms, window=window).exponent
    return DecayMeasurement(
        float(sigma),
        float(tau),
        t_grid,
        norms,
        fit,
        -fit.exponent,
        exp_fit,
        _classify_super_polynomial(fit, exp_fit),
        growth,
    )


@dataclass(frozen=True)
class ConsistencyReport:
    passed: bool
    margin: float | None
    detail: str


def check_consistency(measurement, prediction, tol):
    """PASS iff the measured decay exponent is at least the guaranteed one
    (within tol); rho = oo passes through the super-polynomial flag."""
    if not prediction.applicable:
        raise DomainError(
            f"prediction {prediction.source} is not applicable: "
            + "; ".join(c.name for c in prediction.conditions if not c.passed)
        )
    if prediction.rho == INF:
        if measurement.super_polynomial:
            return ConsistencyReport(True, None, "super-polynomial measurement matches rho=oo")
        return ConsistencyReport(
            False, None, "rho=oo predicted but measurement is not super-polynomial"
        )
    if measurement.super_polynomial:
        return ConsistencyReport(
            True, None, f"super-polynomial decay dominates rho={prediction.rho:g}"
        )
    margin = measurement.rho_hat - prediction.rho
    passed = margin >= -tol
    return ConsistencyReport(
        passed,
        float(margin),
        f"measured rho_hat={measurement.rho_hat:.4f} vs predicted {prediction.rho:.4f} "
        f"({prediction.source}, tol={tol:g})",
    )
