"""Scale selection, regression weights, and the exponent estimate itself.

The estimate is a weighted linear fit, in log scale, of the squared-transform
sums against j. Weights satisfy sum w = 0 and sum j w = 1, so the fit reads
off the slope directly and the taper-count factor cancels without being
computed.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateScales, DomainError, EmptyInput, WindowTooSmall
from .geometry import estimate_intensity
from .simulate import poisson
from .transforms import CurveC, curve_C, taper_set_id, transform_grid

DEFAULT_N_SCALES = 50

# Diagnostic grid: 120 scales, step 0.01, on (0.1, 1.3].
DIAGNOSTIC_GRID = np.round(np.linspace(0.11, 1.30, 120), 10)

INTENSITY_WARN_TOL = 0.05


@dataclass(frozen=True)
class ScalePlan:
    """Strictly increasing scales with their regression weights."""

    scales: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        scales = np.asarray(self.scales, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "weights", weights)
        if scales.ndim != 1 or len(scales) < 2:
            raise DomainError("a scale plan needs at least two scales")
        if np.any(np.diff(scales) <= 0):
            raise DomainError("scales must be strictly increasing")
        if not (np.all(scales > 0) and np.all(scales <= 1.3)):
            raise DomainError("scales must lie in (0, 1.3]")
        if len(weights) != len(scales):
            raise DomainError("one weight per scale required")
        if abs(weights.sum()) > 1e-12:
            raise DomainError("weights must sum to 0")
        if abs(float(weights @ scales) - 1.0) > 1e-12:
            raise DomainError("weights must satisfy sum j*w = 1")

    def __len__(self):
        return len(self.scales)


def least_squares_weights(J):
    """Slope-reading weights w_j = (j - jbar) / sum (j' - jbar)^2."""
    J = np.asarray(J, dtype=np.float64)
    if len(J) < 2:
        raise DomainError("need at least two scales")
    centered = J - J.mean()
    denom = float(centered @ centered)
    if denom <= 0 or not np.isfinite(denom):
        raise DegenerateScales("scales have zero variance")
    w = centered / denom
    # exact identities can drift at the last ulp; re-center
    w = w - w.mean()
    return ScalePlan(scales=J, weights=w)


def default_scale_plan(j_min, j_max, n_scales=DEFAULT_N_SCALES):
    """Uniform scales on [j_min, j_max], endpoints included."""
    if not 0 < j_min < j_max:
        raise DomainError("need 0 < j_min < j_max")
    return least_squares_weights(np.linspace(j_min, j_max, n_scales))


@dataclass
class EstimateReport:
    alpha_hat: float
    nonempty: bool
    lambda_hat: float
    R: float
    plan: ScalePlan | None
    curve: CurveC | None
    n_points: int
    diagnostics: dict = field(default_factory=dict)
    ci: tuple | None = None


def estimate_alpha(p, set_, plan, curve=None):
    """Point estimate of the hyperuniformity exponent from one pattern.

    The empty pattern yields alpha_hat = 0 with nonempty=False rather than
    an error; downstream consumers must check the flag.
    """
    R = p.half_width
    if not R > 1:
        raise WindowTooSmall(f"window half-width must exceed 1, got {R}")
    lam = estimate_intensity(p)
    if len(p) and abs(lam - 1.0) > INTENSITY_WARN_TOL:
        warnings.warn(
            f"pattern intensity {lam:.3f} is far from 1; normalize first",
            stacklevel=2,
        )
    if len(p) == 0:
        return EstimateReport(
            alpha_hat=0.0, nonempty=False, lambda_hat=0.0, R=R, plan=plan,
            curve=None, n_points=0,
        )
    tg = transform_grid(p, set_, plan.scales)
    sq = np.sum(tg.values**2, axis=1)
    if np.any(sq == 0.0):
        raise DomainError("squared transform sum vanished on a plan scale")
    log_sums = np.log(sq)
    log_R = np.log(R)
    alpha = p.dim - float(plan.weights @ log_sums) / log_R
    if curve is None:
        curve = CurveC(
            grid=plan.scales, values=log_sums / log_R, R=R,
            taper_set_id=taper_set_id(set_),
        )
    return EstimateReport(
        alpha_hat=alpha, nonempty=True, lambda_hat=lam, R=R, plan=plan,
        curve=curve, n_points=len(p),
        diagnostics={"log_sums": log_sums, "scales": plan.scales},
    )


def calibrate_jmax(set_, R):
    """Largest usable scale: tapers at scale j must fit inside the window.

    The limit is 1 - log(max support) / log R, clamped to 1; supports come
    from the set's cached table.
    """
    if not R > 1:
        raise WindowTooSmall(f"need R > 1, got {R}")
    sigma = set_.max_support
    if not R > sigma:
        raise WindowTooSmall(f"window half-width {R} below taper support {sigma:.3g}")
    j_max = 1.0 - np.log(sigma) / np.log(R)
    j_max = min(j_max, 1.0)
    if j_max <= 0.1:
        raise WindowTooSmall(
            f"usable scale range collapsed (j_max = {j_max:.3f}) at R = {R}"
        )
    return float(j_max)


# Poisson reference knee: constants fixed once against the analytic rule.
_POISSON_GRID = DIAGNOSTIC_GRID
_ANCHOR = (0.3, 0.6)
_BAND_FLOOR = 0.008
_BAND_Z = 2.0


def calibrate_jmax_poisson(set_, R, replicates=60, seed=1234):
    """Empirical j_max: where the mean Poisson curve leaves its slope-d line.

    For Poisson input C(j) is a straight line of slope d until window
    truncation bites, which pulls the curve strictly downward and keeps it
    down. The mean curve over replicates is fit on the anchor interval;
    the knee is the last scale before the residual drops below a scatter
    band and stays below it for good (one-sided and persistent, so smooth
    replicate-noise wiggles near the anchor cannot fake a knee).
    """
    if replicates < 5:
        raise DomainError("need at least 5 replicates")
    d = set_.dim
    grid = _POISSON_GRID
    curves = np.empty((replicates, len(grid)))
    for r in range(replicates):
        p = poisson(1.0, R, seed=seed + r, d=d)
        curves[r] = curve_C(p, set_, grid).values
    mean = curves.mean(axis=0)
    se = curves.std(axis=0, ddof=1) / np.sqrt(replicates)
    anchor = (grid >= _ANCHOR[0]) & (grid <= _ANCHOR[1])
    intercept = float(np.mean(mean[anchor] - d * grid[anchor]))
    resid = mean - (d * grid + intercept)
    band = np.maximum(_BAND_FLOOR, _BAND_Z * se)
    departed = resid < -band
    start = int(np.argmax(grid > _ANCHOR[1]))
    for k in range(start, len(grid)):
        if departed[k:].all():
            return float(grid[k - 1])
    return float(grid[-1])


def select_jmin(curve, j_max):
    """Smallest trustworthy scale, from the knee of the diagnostic curve.

    Fits a continuous two-segment (hinge) line over every interior
    breakpoint on the grid; if the two-segment fit does not beat one
    straight line by at least 5% RSS there is no visible knee and the
    fallback is j_max / 2.  On noisy curves the RSS profile plateaus, so
    among breakpoints within 5% of the optimum the earliest wins: it keeps
    the longest usable scale range and a sharp genuine knee is unaffected.
    """
    mask = curve.grid <= j_max
    grid = curve.grid[mask]
    vals = curve.values[mask]
    if len(grid) < 10:
        raise DomainError("need at least 10 curve points below j_max")
    ones = np.ones_like(grid)
    design1 = np.column_stack([ones, grid])
    rss1 = _fit_rss(design1, vals)
    # an exactly linear curve leaves only rounding noise in rss1; any
    # "improvement" below that floor is meaningless
    floor = 1e-14 * max(1.0, float(vals @ vals))
    breaks = grid[2:-2]
    rss2 = np.empty(len(breaks))
    for k, b in enumerate(breaks):
        design2 = np.column_stack([ones, grid, np.maximum(grid - b, 0.0)])
        rss2[k] = _fit_rss(design2, vals)
    if len(breaks) == 0 or rss1 <= floor or rss2.min() > 0.95 * rss1:
        return j_max / 2.0
    return float(breaks[np.argmax(rss2 <= 1.05 * rss2.min())])


def _fit_rss(design, y):
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    r = y - design @ coef
    return float(r @ r)


def pooled_estimate(reports):
    """Mean alpha_hat over per-frame reports of comparable patterns."""
    if not reports:
        raise EmptyInput("no reports to pool")
    if any(not r.nonempty for r in reports):
        raise DomainError("cannot pool reports of empty patterns")
    return float(np.mean([r.alpha_hat for r in reports]))
