"""Curve fitting and figure-of-merit extraction.

All fits use deterministic moment-based initialization (no random restarts)
so repeated runs give identical results.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import FitError
from .pump import bessel_visibility
from .records import Scan1D

__all__ = [
    "GaussianFit",
    "VisibilityFit",
    "fit_gaussian",
    "fit_visibility",
    "fit_bessel_visibility",
    "scan_fwhm",
]

FWHM_SIGMA_RATIO = 2.0 * np.sqrt(2.0 * np.log(2.0))  # 2.35482


@dataclass(frozen=True)
class GaussianFit:
    amplitude: float
    mean: float
    sigma: float
    offset: float
    residual_rms: float

    @property
    def fwhm(self) -> float:
        return FWHM_SIGMA_RATIO * self.sigma


@dataclass(frozen=True)
class VisibilityFit:
    visibility: float       # in [0, 1]
    fringe_period: float    # same units as the scan axis
    phase: float            # rad
    residual_rms: float


def _as_xy(scan):
    if isinstance(scan, Scan1D):
        return scan.xs, scan.values
    xs, ys = scan
    return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)


def fit_gaussian(scan, weights=None, max_iter=200) -> GaussianFit:
    """Nonlinear least-squares Gaussian fit y = A exp(-(x-mu)^2/(2 s^2)) + c.

    Parameters
    ----------
    scan : Scan1D or (xs, ys)
        Single-peaked data with at least 5 samples; the peak must not sit on
        the boundary.
    weights : array, optional
        Per-point weights applied to the residuals.

    Raises
    ------
    FitError
        If the data is degenerate (flat, too short, boundary peak) or the
        optimizer fails to converge.
    """
    xs, ys = _as_xy(scan)
    if xs.size < 5:
        raise FitError("need at least 5 samples for a Gaussian fit")
    i_max = int(np.argmax(ys))
    span = ys.max() - ys.min()
    if span <= 0 or span < 1e-12 * max(abs(ys.max()), 1e-300):
        raise FitError("scan is flat; no peak to fit")
    if i_max in (0, xs.size - 1):
        raise FitError("peak sits on the scan boundary")

    offset0 = float(ys.min())
    amp0 = float(ys[i_max] - offset0)
    w = np.clip(ys - offset0, 0.0, None)
    mu0 = float(np.sum(w * xs) / np.sum(w))
    var0 = float(np.sum(w * (xs - mu0) ** 2) / np.sum(w))
    sigma0 = np.sqrt(var0) if var0 > 0 else (xs[-1] - xs[0]) / 6.0
    wts = np.ones_like(ys) if weights is None else np.asarray(weights, dtype=float)

    def residuals(theta):
        a, mu, s, c = theta
        return wts * (a * np.exp(-((xs - mu) ** 2) / (2.0 * s * s)) + c - ys)

    result = least_squares(residuals, [amp0, mu0, sigma0, offset0], method="lm",
                           xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=max_iter * 5)
    if not result.success:
        raise FitError(f"Gaussian fit did not converge: {result.message}")
    a, mu, s, c = result.x
    rms = float(np.sqrt(np.mean((residuals(result.x) / np.where(wts == 0, 1, wts)) ** 2)))
    return GaussianFit(amplitude=float(a), mean=float(mu), sigma=float(abs(s)),
                       offset=float(c), residual_rms=rms)


def _period_search(xs, ys, p_min, p_max, n_grid=200):
    """Deterministic fringe-period search.

    For each trial period, fit the linearized model
    q0(x) + qc(x) cos + qs(x) sin with quadratic q's and keep the period with
    the smallest residual.  Returns the three best candidates.
    """
    n = xs.size
    base = np.stack([np.ones(n), xs, xs * xs], axis=1)
    best = []
    for period in np.geomspace(p_min, p_max, n_grid):
        arg = 2.0 * np.pi * xs / period
        cols = np.hstack([base, base * np.cos(arg)[:, None], base * np.sin(arg)[:, None]])
        coef, *_ = np.linalg.lstsq(cols, ys, rcond=None)
        r = ys - cols @ coef
        best.append((float(r @ r), period))
    best.sort()
    return [p for _, p in best[:3]]


def fit_visibility(scan, period_hint=None, window=None) -> VisibilityFit:
    """Fit I(x) = E(x) [1 + V cos(2 pi x / P + phi)] and return V in [0, 1].

    E(x) = exp(e0 + e1 x + e2 x^2) is a slowly varying non-negative envelope.
    The scan must cover at least 3 fringe periods.

    Parameters
    ----------
    scan : Scan1D or (xs, ys)
    period_hint : float, optional
        Expected fringe period.  Without it the period is found by a
        deterministic residual grid search, which can lock onto envelope
        structure when the fringes are very weak; callers that know the
        geometry should pass the hint.
    window : float, optional
        Restrict the fit to |x - x_center| <= window.

    Raises
    ------
    FitError
        If the fit does not converge or the residual RMS exceeds 20% of the
        maximum intensity.
    """
    xs, ys = _as_xy(scan)
    if window is not None:
        center = 0.5 * (xs[0] + xs[-1])
        keep = np.abs(xs - center) <= window
        xs, ys = xs[keep], ys[keep]
    if xs.size < 8:
        raise FitError("too few samples for a fringe fit")
    scale = float(ys.max())
    if scale <= 0:
        raise FitError("scan has no positive samples")
    ys = ys / scale

    # fit in shifted dimensionless coordinates so all parameters share scale
    x_mid = 0.5 * (xs[0] + xs[-1])
    x_half = 0.5 * (xs[-1] - xs[0])
    u = (xs - x_mid) / x_half
    du = u[1] - u[0]

    # constant scan: no fringe content at all
    if ys.max() - ys.min() < 1e-12:
        return VisibilityFit(visibility=0.0, fringe_period=xs[-1] - xs[0],
                             phase=0.0, residual_rms=0.0)

    candidates = ([period_hint / x_half] if period_hint is not None
                  else _period_search(u, ys, 4.0 * du, 2.0 / 3.0))

    def model(theta):
        e0, e1, e2, v, period, phi = theta
        env = np.exp(e0 + e1 * u + e2 * u * u)
        return env * (1.0 + v * np.cos(2.0 * np.pi * u / period + phi))

    best = None
    for p0 in candidates:
        theta0 = [np.log(max(ys.mean(), 1e-12)), 0.0, 0.0, 0.5, p0, 0.0]
        result = least_squares(lambda th: model(th) - ys, theta0, method="lm",
                               xtol=1e-12, ftol=1e-12, gtol=1e-12,
                               max_nfev=20000)
        rss = float(result.fun @ result.fun)
        if best is None or rss < best[0]:
            best = (rss, result)
    result = best[1]
    if not result.success:
        raise FitError(f"visibility fit did not converge: {result.message}")
    rms = float(np.sqrt(np.mean((model(result.x) - ys) ** 2)))
    if rms > 0.20:
        raise FitError(f"visibility fit residual RMS {rms:.3f} exceeds 20% of max")
    v = min(abs(float(result.x[3])), 1.0)
    period = abs(float(result.x[4])) * x_half
    phase = float(result.x[5]) - 2.0 * np.pi * x_mid / period
    return VisibilityFit(visibility=v, fringe_period=period,
                         phase=float(np.mod(phase + np.pi, 2 * np.pi) - np.pi),
                         residual_rms=rms)


def fit_bessel_visibility(points, f: float, lambda_p: float,
                          a_s_bounds=(1e-7, 1.0)) -> float:
    """Estimate the diffuser spot radius a_s from (d12, visibility) pairs.

    One-parameter least-squares inversion of the Bessel visibility law.
    Needs at least 3 points with distinct separations.
    """
    pts = [(float(d), float(v)) for d, v in points]
    if len(pts) < 3:
        raise FitError("need at least 3 (d12, visibility) points")
    d12 = np.array([p[0] for p in pts])
    vis = np.array([p[1] for p in pts])
    if np.unique(d12).size < 3:
        raise FitError("d12 values must be distinct")
    k_p = 2.0 * np.pi / lambda_p

    def predict(a_s):
        return bessel_visibility(k_p * d12 * a_s / f)

    # deterministic coarse grid, then local refinement
    grid = np.geomspace(a_s_bounds[0], a_s_bounds[1], 400)
    costs = [float(np.sum((predict(a) - vis) ** 2)) for a in grid]
    a0 = grid[int(np.argmin(costs))]
    result = least_squares(lambda a: predict(a[0]) - vis, [a0], method="trf",
                           bounds=([a_s_bounds[0]], [a_s_bounds[1]]),
                           xtol=1e-14, ftol=1e-14)
    if not result.success:
        raise FitError(f"Bessel-law fit did not converge: {result.message}")
    return float(result.x[0])


def scan_fwhm(scan) -> float:
    """Full width at half maximum of a single-peaked scan, linearly interpolated."""
    xs, ys = _as_xy(scan)
    i_max = int(np.argmax(ys))
    if i_max in (0, xs.size - 1):
        raise FitError("peak sits on the scan boundary")
    half = ys[i_max] / 2.0

    def crossing(i_from, i_to, step):
        prev = i_from
        for i in range(i_from + step, i_to, step):
            if ys[i] < half:
                x0, x1 = xs[prev], xs[i]
                y0, y1 = ys[prev], ys[i]
                return x0 + (half - y0) * (x1 - x0) / (y1 - y0)
            prev = i
        raise FitError("half-maximum level not reached inside the scan")

    right = crossing(i_max, xs.size, +1)
    left = crossing(i_max, -1, -1)
    return float(right - left)
