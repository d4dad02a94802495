"""Resolvent probing along vertical lines, growth-pair fitting, and
spectral-bound estimation.

Probes evaluate ||(lam + A)^{-1}|| at lam = eta + i xi; a probing run
covers both signs of xi because the models need not have conjugation
symmetry.  Fits estimate the growth envelope: mirrored pairs are reduced
by max and the surviving points are reduced to per-bin maxima before the
log-log regression, so that resonance peaks rather than the valleys
between them set the exponent.

Probing covers the imaginary axis plus a finite eta grid only, so every
result here is 'probed', never 'certified'.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    EdgeDominatedWarning,
    InsufficientDataError,
    NearSingularityError,
    UnsupportedModelError,
)
from .numcore import LogGrid, PowerFit, fit_exp_rate, fit_power_law

_SNAP_TOL = 0.05


@dataclass(frozen=True)
class ProbeEntry:
    xi: float
    eta: float
    norm: float | None
    status: str  # "ok", "singular", "edge"


@dataclass(frozen=True)
class ProbeTable:
    entries: list[ProbeEntry]

    def ok_entries(self):
        return [e for e in self.entries if e.norm is not None]


def probe_resolvent_norms(model, xi_grid, eta=0.0):
    """||(lam + A)^{-1}|| at lam = eta + i xi for xi in +/- grid.

    Probes that hit the spectrum produce per-probe "singular" entries and
    the analysis continues; suprema flagged as edge-dominated are kept
    with status "edge".
    """
    nodes = xi_grid.nodes if isinstance(xi_grid, LogGrid) else np.asarray(xi_grid, dtype=float)
    entries = []
    for xi in nodes:
        for sign in (1.0, -1.0):
            lam = complex(eta, sign * xi)
            status = "ok"
            norm = None
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always", EdgeDominatedWarning)
                    norm = model.shifted_resolvent_norm(lam)
                if any(issubclass(w.category, EdgeDominatedWarning) for w in caught):
                    status = "edge"
            except NearSingularityError:
                status = "singular"
            entries.append(ProbeEntry(float(sign * xi), float(eta), norm, status))
    return ProbeTable(entries)


@dataclass(frozen=True)
class ResolventGrowthProfile:
    """Fitted resolvent-growth pair with the associated sup constant."""

    alpha_hat: float
    beta_hat: float
    m_constant: float
    low_fit: PowerFit | None
    high_fit: PowerFit | None


def _envelope(xis, norms, bins_per_decade=6):
    """Per-bin maxima of (|xi|, norm) pairs on a log-spaced binning."""
    xis = np.asarray(xis)
    norms = np.asarray(norms)
    lo, hi = xis.min(), xis.max()
    if hi <= lo * (1.0 + 1e-12):
        return xis, norms
    n_bins = max(3, int(math.ceil(math.log10(hi / lo) * bins_per_decade)))
    edges = np.geomspace(lo, hi * (1.0 + 1e-12), n_bins + 1)
    bx, bv = [], []
    for i in range(n_bins):
        sel = (xis >= edges[i]) & (xis < edges[i + 1])
        if np.any(sel):
            j = int(np.argmax(norms[sel]))
            bx.append(xis[sel][j])
            bv.append(norms[sel][j])
    return np.asarray(bx), np.asarray(bv)


def _window_fit(xis, norms, bins_per_decade):
    bx, bv = _envelope(xis, norms, bins_per_decade)
    if len(bx) < 3:
        # too few bins to trim; fit the raw points
        return fit_power_law(bx, bv, window=(0, len(bx)))
    order = np.argsort(bx)
    return fit_power_law(bx[order], bv[order])


def fit_growth_profile(table, split=1.0, snap_tol=_SNAP_TOL, bins_per_decade=6):
    """Fit the low/high-frequency growth pair from imaginary-axis probes.

    alpha_hat is the clamped negative slope over |xi| <= split, beta_hat
    the clamped slope over |xi| >= split; fitted slopes of magnitude
    below ``snap_tol`` snap to zero (low-order resolvent growth collapses
    to exponent zero).  Requires at least 8 usable probes on each side of
    the split.
    """
    ok = table.ok_entries()
    # envelope over mirrored pairs
    by_abs = {}
    for e in ok:
        key = abs(e.xi)
        if key == 0.0:
            continue
        by_abs[key] = max(by_abs.get(key, 0.0), e.norm)
    xs = np.array(sorted(by_abs))
    vs = np.array([by_abs[x] for x in xs])
    low = xs <= split
    high = xs >= split
    if low.sum() < 8 or high.sum() < 8:
        raise InsufficientDataError(
            f"need >= 8 probes on each side of |xi|={split}, "
            f"got {int(low.sum())} low / {int(high.sum())} high"
        )
    low_fit = _window_fit(xs[low], vs[low], bins_per_decade)
    high_fit = _window_fit(xs[high], vs[high], bins_per_decade)
    alpha_hat = max(0.0, -low_fit.exponent)
    beta_hat = max(0.0, high_fit.exponent)
    if alpha_hat < snap_tol:
        alpha_hat = 0.0
    if beta_hat < snap_tol:
        beta_hat = 0.0
    lam = np.array([complex(e.eta, e.xi) for e in ok])
    norms = np.array([e.norm for e in ok])
    weights = np.abs(lam) ** alpha_hat / (1.0 + np.abs(lam)) ** (alpha_hat + beta_hat)
    m_constant = float(np.max(weights * norms))
    return ResolventGrowthProfile(alpha_hat, beta_hat, m_constant, low_fit, high_fit)


@dataclass(frozen=True)
class SectorialityEstimate:
    m_constant: float
    angle: float  # pi - arcsin(1/M)
    edge_flagged: bool


def sectoriality_constant(model, lambda_grid):
    """sup over positive lam of ||lam (lam + A)^{-1}|| with the derived
    sectorial-angle report pi - arcsin(1/M)."""
    nodes = lambda_grid.nodes if isinstance(lambda_grid, LogGrid) else np.asarray(lambda_grid, dtype=float)
    if np.any(nodes <= 0):
        raise DomainError("sectoriality probes must be positive reals")
    best = 0.0
    edge = False
    vals = []
    for lam in nodes:
        if model.spectrum_distance(-lam) < 1e-11:
            raise DomainError(f"probe lam={lam} hits the spectrum of -A")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", EdgeDominatedWarning)
            v = lam * model.shifted_resolvent_norm(complex(lam, 0.0))
        if any(issubclass(w.category, EdgeDominatedWarning) for w in caught):
            edge = True
        vals.append(v)
        best = max(best, v)
    if len(vals) >= 2 and vals[-1] >= max(vals) * (1.0 - 1e-12):
        edge = True  # supremum still rising at the largest probe
    m = max(best, 1.0)
    return SectorialityEstimate(float(best), math.pi - math.asin(1.0 / m), edge)


@dataclass(frozen=True)
class SpectralBounds:
    """Spectral abscissa, tempered-resolvent abscissas, and growth rate."""

    s_minus_a: float
    s_beta: dict[float, float] = field(default_factory=dict)
    omega0_hat: float = math.nan


def _line_is_tame(model, eta, beta, xi_grid, margin=1.08):
    """Probe the vertical line Re lam = eta: True when the tempered norms
    (1+|lam|)^{-beta} ||(lam+A)^{-1}|| look bounded.

    Untame lines show singular probes, edge-dominated suprema, or a
    tempered envelope whose outer-half maximum clearly exceeds the
    inner-half maximum (growth along the line); a saturating envelope
    stays within the margin.
    """
    table = probe_resolvent_norms(model, xi_grid, eta)
    ok = table.ok_entries()
    if len(ok) < len(table.entries):
        return False
    if any(e.status == "edge" for e in table.entries):
        return False
    by_abs = {}
    for e in ok:
        lam = complex(e.eta, e.xi)
        val = e.norm * (1.0 + abs(lam)) ** (-beta)
        key = abs(e.xi)
        by_abs[key] = max(by_abs.get(key, 0.0), val)
    xs = np.array(sorted(by_abs))
    vs = np.array([by_abs[x] for x in xs])
    # compare the outermost log-quarter against the one before it: a line
    # with genuine growth keeps rising there, while bounded lines (even
    # with a saturating low-frequency transient) have flattened out
    logx = np.log(xs)
    q3 = logx[0] + 0.50 * (logx[-1] - logx[0])
    q4 = logx[0] + 0.75 * (logx[-1] - logx[0])
    third = vs[(logx >= q3) & (logx < q4)]
    fourth = vs[logx >= q4]
    if len(third) < 2 or len(fourth) < 2:
        return bool(np.argmax(vs) < len(vs) - 1)
    return float(fourth.max()) <= margin * float(third.max())


def spectral_bounds(model, t_grid, eta_grid, betas=(0.0, 1.0), xi_grid=None, tol=1e-2):
    """Exact spectral abscissa s(-A), bisected tempered abscissas
    s_beta(-A), and the fitted exponential growth rate of ||T(t)||."""
    try:
        s = model.spectral_abscissa_neg()
    except Exception as exc:  # pragma: no cover - all bundled models are exact
        raise UnsupportedModelError("model does not expose an exact spectrum") from exc
    t_nodes = t_grid.nodes if isinstance(t_grid, LogGrid) else np.asarray(t_grid, dtype=float)
    norms = np.array([model.semigroup_norm(t) for t in t_nodes])
    omega0 = fit_exp_rate(t_nodes, norms).rate
    eta_nodes = eta_grid.nodes if isinstance(eta_grid, LogGrid) else np.asarray(eta_grid, dtype=float)
    if xi_grid is None:
        xi_grid = np.geomspace(1e-2, 1e3, 48)
    s_beta = {}
    for beta in betas:
        lo = float(s)  # tame fails at/below the spectral abscissa
        hi = float(np.max(eta_nodes))
        if not _line_is_tame(model, hi, beta, xi_grid):
            s_beta[float(beta)] = math.inf
            continue
        # shrink hi toward the smallest tame eta on the given grid first
        for eta in sorted(eta_nodes):
            if eta <= lo:
                continue
            if _line_is_tame(model, float(eta), beta, xi_grid):
                hi = float(eta)
                break
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _line_is_tame(model, mid, beta, xi_grid):
                hi = mid
            else:
                lo = mid
        s_beta[float(beta)] = hi
    return SpectralBounds(float(s), s_beta, float(omega0))
