"""Benchmark point processes with known or conjectured exponents.

All samplers draw through a counter-based generator keyed by one integer
seed; a (spec, seed) pair pins the pattern exactly, across platforms.
"""

import numpy as np

from .errors import DomainError, Unmatchable
from .geometry import PointPattern, Window
from .numerics import make_rng

try:
    from scipy.spatial import cKDTree
except ImportError:  # pragma: no cover
    cKDTree = None


def poisson(lam, R, seed, d=2):
    """Homogeneous Poisson pattern of intensity lam on [-R, R]^d."""
    if lam < 0:
        raise DomainError("intensity must be nonnegative")
    if R <= 0:
        raise DomainError("half-width must be positive")
    rng = make_rng(seed)
    n = rng.poisson(lam * (2.0 * R) ** d)
    pts = rng.uniform(-R, R, size=(n, d))
    return PointPattern(pts, Window(half_width=float(R)), dim=d)


def one_sided_stable(delta, seed, size=None):
    """Positive stable draws with Laplace transform exp(-s^delta).

    Ratio-of-trig construction: Y = (a(V) / W)^((1-delta)/delta) with V
    uniform, W unit exponential, and
    a(v) = sin((1-d)pi v) sin(d pi v)^(d/(1-d)) / sin(pi v)^(1/(1-d)).
    At delta = 1 the law degenerates to the constant 1.
    """
    if not 0 < delta <= 1:
        raise DomainError("delta must lie in (0, 1]")
    scalar = size is None
    n = 1 if scalar else int(size)
    if delta == 1.0:
        out = np.ones(n)
        return float(out[0]) if scalar else out
    rng = make_rng(seed)
    v = rng.uniform(0.0, 1.0, n)
    w = rng.exponential(1.0, n)
    out = _kanter(delta, v, w)
    return float(out[0]) if scalar else out


def _kanter(delta, v, w):
    # evaluated in log space: the three sine powers overflow for delta
    # near 0 or 1 long before the final value does
    log_a = (
        np.log(np.sin((1.0 - delta) * np.pi * v))
        + (delta / (1.0 - delta)) * np.log(np.sin(delta * np.pi * v))
        - (1.0 / (1.0 - delta)) * np.log(np.sin(np.pi * v))
    )
    return np.exp(((1.0 - delta) / delta) * (log_a - np.log(w)))


def cloaked_lattice(alpha, sigma, R, seed):
    """Perturbed integer lattice with hyperuniformity exponent alpha.

    Each site gets a uniform jitter over its cell plus a heavy-tailed
    elliptical displacement sigma * sqrt(Y) * Z with Y one-sided stable of
    index alpha / 2; alpha = 2 degenerates to Gaussian displacements.
    Sites are generated with a margin so that mass jumping into the window
    from outside is represented, then restricted to [-R, R]^2.
    """
    if not 0 < alpha <= 2:
        raise DomainError("alpha must lie in (0, 2]")
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    if R <= 1:
        raise DomainError("half-width must exceed 1")
    delta = alpha / 2.0
    if delta >= 1.0:
        margin = 6.0 * sigma
    else:
        # heavy displacement tails: inflate the margin, capped at 3R (the
        # few-permille of jumps from beyond the cap is absorbed by
        # intensity normalization downstream)
        margin = min(6.0 * sigma * (1.0 + 3.0 ** (2.0 / alpha)), 3.0 * R)
    lo = int(np.floor(-R - margin))
    hi = int(np.ceil(R + margin))
    side = np.arange(lo, hi + 1, dtype=np.float64)
    qx, qy = np.meshgrid(side, side, indexing="ij")
    sites = np.column_stack([qx.ravel(), qy.ravel()])
    n = len(sites)
    rng = make_rng(seed)
    global_shift = rng.uniform(0.0, 1.0, 2)
    cell_jitter = rng.uniform(-0.5, 0.5, (n, 2))
    if delta >= 1.0:
        y = np.ones(n)
    else:
        v = rng.uniform(0.0, 1.0, n)
        w = rng.exponential(1.0, n)
        y = _kanter(delta, v, w)
    z = rng.standard_normal((n, 2))
    pts = sites + global_shift + cell_jitter + sigma * np.sqrt(y)[:, None] * z
    inside = np.max(np.abs(pts), axis=1) <= R
    return PointPattern(pts[inside], Window(half_width=float(R)), dim=2)


def matched_process(lambda_p, R, seed, max_attempts=3):
    """Mutual nearest-neighbor matching of a Poisson cloud to the unit lattice.

    On the torus [-R, R)^2, lattice points and surplus Poisson points are
    matched in rounds: pairs that choose each other are bound and removed.
    The returned pattern is the set of matched Poisson points, one per
    lattice site. Needs lambda_p > 1 so the cloud outnumbers the lattice;
    a replicate whose cloud comes up short is redrawn, a few times only.
    """
    if cKDTree is None:  # pragma: no cover
        raise ImportError("matched_process requires scipy")
    if lambda_p <= 1:
        raise DomainError("lambda_p must exceed 1 (lattice intensity)")
    if R <= 1:
        raise DomainError("half-width must exceed 1")
    n_side = int(round(2.0 * R))
    if abs(2.0 * R - n_side) > 1e-9:
        raise DomainError("2R must be an integer for a unit lattice tiling")
    spacing = 2.0 * R / n_side
    for attempt in range(max_attempts):
        rng = make_rng(seed + 1_000_003 * attempt)
        shift = rng.uniform(0.0, 1.0, 2)
        side = np.arange(n_side, dtype=np.float64)
        lx, ly = np.meshgrid(side, side, indexing="ij")
        lattice = -R + (np.column_stack([lx.ravel(), ly.ravel()])
                        + shift) * spacing
        n_pois = rng.poisson(lambda_p * (2.0 * R) ** 2)
        if n_pois < len(lattice):
            continue
        cloud = rng.uniform(-R, R, (n_pois, 2))
        matched = _mutual_match(lattice + R, cloud + R, 2.0 * R) - R
        return PointPattern(matched, Window(half_width=float(R)), dim=2)
    raise Unmatchable(
        f"Poisson cloud smaller than the lattice in {max_attempts} attempts"
    )


def _mutual_match(targets, cloud, box):
    """Torus mutual-NN matching; returns cloud points, one per target."""
    # wrap so rounding can never push a coordinate onto the seam
    targets = np.mod(targets, box)
    cloud = np.mod(cloud, box)
    t_left = np.arange(len(targets))
    c_left = np.arange(len(cloud))
    chosen = np.empty((len(targets), 2))
    n_chosen = 0
    while len(t_left):
        t_pts = targets[t_left]
        c_pts = cloud[c_left]
        tree_c = cKDTree(c_pts, boxsize=box)
        _, t_to_c = tree_c.query(t_pts)
        tree_t = cKDTree(t_pts, boxsize=box)
        _, c_to_t = tree_t.query(c_pts)
        mutual = c_to_t[t_to_c] == np.arange(len(t_left))
        # the globally closest pair is always mutual, so progress is certain
        pick = c_left[t_to_c[mutual]]
        chosen[n_chosen:n_chosen + len(pick)] = cloud[pick]
        n_chosen += len(pick)
        t_left = t_left[~mutual]
        keep = np.ones(len(c_left), dtype=bool)
        keep[t_to_c[mutual]] = False
        c_left = c_left[keep]
    return chosen


def rsa(lambda_prop, r, R, seed):
    """Random sequential adsorption: proposals accepted if no accepted
    point lies within distance r, in uniform arrival order."""
    if lambda_prop <= 0 or r < 0 or R <= 0:
        raise DomainError("rsa needs lambda_prop > 0, r >= 0, R > 0")
    rng = make_rng(seed)
    n = rng.poisson(lambda_prop * (2.0 * R) ** 2)
    pts = rng.uniform(-R, R, (n, 2))
    marks = rng.uniform(0.0, 1.0, n)
    order = np.argsort(marks, kind="stable")
    if r == 0.0:
        return PointPattern(pts[order], Window(half_width=float(R)), dim=2)
    cell = r
    accepted = np.empty((n, 2))
    n_acc = 0
    buckets = {}
    r2 = r * r
    for idx in order:
        x, y = pts[idx]
        cx, cy = int(np.floor(x / cell)), int(np.floor(y / cell))
        ok = True
        for bx in range(cx - 1, cx + 2):
            for by in range(cy - 1, cy + 2):
                for k in buckets.get((bx, by), ()):
                    dx = accepted[k, 0] - x
                    dy = accepted[k, 1] - y
                    if dx * dx + dy * dy < r2:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            accepted[n_acc] = pts[idx]
            buckets.setdefault((cx, cy), []).append(n_acc)
            n_acc += 1
    return PointPattern(accepted[:n_acc].copy(), Window(half_width=float(R)), dim=2)
