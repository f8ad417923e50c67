"""Certified root location for analytic functions on rectangles.

The count of zeros inside a rectangle comes from the argument principle:
the winding number of f along the boundary, measured on an adaptively
refined sample of the perimeter.  Rectangles are then subdivided until each
piece holds one zero (polished by Newton) or is smaller than the requested
tolerance (reported as a multiple-root cluster).  The sum of reported
multiplicities always equals the boundary count of the original rectangle;
a violation raises instead of returning silently wrong data.

Functions are evaluated in batches: ``f`` (and the optional ``fprime``)
must accept a complex ndarray and return a matching ndarray, which is what
lets the backend kernels carry the load on dense spectra.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryZeroError, DimensionError, ResolutionError
from .linalg import cluster_points

__all__ = [
    "Rectangle",
    "RootResult",
    "count_zeros",
    "find_roots",
]

MAX_PHASE_STEP = math.pi / 4       # largest trusted phase change per interval
MAX_MAG_JUMP = math.log(4.0)       # largest trusted |log|f|| change
DERIV_EST_LIMIT = math.pi / 2      # largest trusted |dz| * |f'/f| estimate
LEN_OUTLIER_FACTOR = 8.0           # force-split intervals this far over median
_JITTERS = (0.0, 0.033, -0.051, 0.017)
_INFLATE_FRACTION = 1e-6
_EPS_MACH = 2.0 ** -52
MULTI_ROOT_RES = 2.0 ** -26   # sqrt(machine eps): cluster resolution limit


def _noise_radius(mult):
    """Resolution limit around an m-fold root at double precision.

    Within (machine eps)^(1/m) of such a root (times the local scale) the
    function value is smaller than its own evaluation noise, so no count,
    split or Newton step can be trusted there.
    """
    return _EPS_MACH ** (1.0 / max(1.0, float(mult)))


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned closed rectangle in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        vals = (self.re_min, self.re_max, self.im_min, self.im_max)
        if not all(np.isfinite(v) for v in vals):
            raise DimensionError("rectangle bounds must be finite")
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise DimensionError(f"degenerate rectangle {vals}")

    @property
    def width(self):
        return self.re_max - self.re_min

    @property
    def height(self):
        return self.im_max - self.im_min

    @property
    def diag(self):
        return math.hypot(self.width, self.height)

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max),
                       0.5 * (self.im_min + self.im_max))

    def contains(self, z, slack=0.0):
        return (self.re_min - slack <= z.real <= self.re_max + slack
                and self.im_min - slack <= z.imag <= self.im_max + slack)

    def inflate(self, delta):
        return Rectangle(self.re_min - delta, self.re_max + delta,
                         self.im_min - delta, self.im_max + delta)


@dataclass(frozen=True)
class RootResult:
    """One located root (or unresolved cluster) with its certificate data."""

    location: complex
    multiplicity: int
    residual: float
    newton_converged: bool


class _BoundaryNearZero(Exception):
    """Internal: a boundary sample fell below the relative zero threshold."""


class _UnsplittableCell(Exception):
    """Internal: every jittered split line ran through a zero's noise zone."""


def _boundary_points(rect, t):
    """Map arc-length fractions t in [0, 1) to boundary points, ccw."""
    w, h = rect.width, rect.height
    P = 2.0 * (w + h)
    s = t * P
    z = np.empty(t.shape, np.complex128)
    m = s < w
    z[m] = rect.re_min + s[m] + 1j * rect.im_min
    m = (s >= w) & (s < w + h)
    z[m] = rect.re_max + 1j * (rect.im_min + (s[m] - w))
    m = (s >= w + h) & (s < 2 * w + h)
    z[m] = rect.re_max - (s[m] - w - h) + 1j * rect.im_max
    m = s >= 2 * w + h
    z[m] = rect.re_min + 1j * (rect.im_max - (s[m] - 2 * w - h))
    return z


def _winding_count(f, fprime, rect, boundary_tol, max_depth, n0=32,
                   max_samples=2_000_000):
    """Winding number of f around rect via adaptive boundary sampling.

    Intervals are refined until the phase step, the log-magnitude step and
    (when fprime is given) the first-order phase estimate |dz| |f'/f| are all
    small; intervals much longer than the resolved median are split as well,
    which stops an interval whose endpoints happen to agree from hiding a
    full extra turn.
    """
    t = np.arange(n0, dtype=np.float64) / n0
    z = _boundary_points(rect, t)
    fz = f(z)
    ratio = None
    if fprime is not None:
        ratio = fprime(z)
    for _ in range(max_depth + 1):
        absf = np.abs(fz)
        # on-boundary zero test: |f| alone cannot be thresholded because it
        # spans many orders of magnitude along these boundaries (exponential
        # growth off the imaginary axis), so estimate the distance to the
        # nearest root first-order as |f| / |f'| (or via a neighbour secant
        # slope when no derivative is available) and flag only roots within
        # boundary_tol * diag of the contour
        if float(absf.min()) == 0.0:
            raise _BoundaryNearZero
        with np.errstate(divide="ignore", invalid="ignore"):
            if ratio is not None:
                dist_est = absf / np.abs(ratio)
            else:
                dz = np.abs(np.diff(z, append=z[0]))
                df = np.abs(np.diff(fz, append=fz[0]))
                slope = np.where(dz > 0.0, df / np.where(dz > 0.0, dz, 1.0),
                                 0.0)
                slope = np.maximum(slope, np.roll(slope, 1))
                dist_est = np.where(slope > 0.0, absf / slope, np.inf)
        if float(np.min(dist_est)) <= boundary_tol * rect.diag:
            raise _BoundaryNearZero
        phase = np.angle(fz)
        dphi = np.diff(phase, append=phase[0])
        dphi = np.mod(dphi + np.pi, 2.0 * np.pi) - np.pi
        magjump = np.abs(np.diff(np.log(absf), append=np.log(absf[0])))
        bad = (np.abs(dphi) > MAX_PHASE_STEP) | (magjump > MAX_MAG_JUMP)

        lens = np.diff(t, append=t[0] + 1.0)
        if fprime is not None:
            w_over_f = np.abs(ratio) / absf
            pair = np.maximum(w_over_f, np.roll(w_over_f, -1))
            P = 2.0 * (rect.width + rect.height)
            bad |= (lens * P * pair) > DERIV_EST_LIMIT
        good_lens = lens[~bad]
        if good_lens.size:
            med = float(np.median(good_lens))
            bad |= lens > LEN_OUTLIER_FACTOR * max(med, 1.0 / max_samples)

        if not bad.any():
            turns = float(dphi.sum()) / (2.0 * np.pi)
            count = int(round(turns))
            if abs(turns - count) > 0.25:
                raise ResolutionError(
                    f"non-integer winding {turns:.3f} on {rect}")
            return count

        # an interval that stays bad after shrinking to the floating-point
        # spacing of its own endpoints cannot be refined further: the phase
        # is jumping because f is evaluation noise there, which happens
        # exactly when a root (possibly multiple) sits on or next to the
        # contour -- treat it as a boundary zero
        P = 2.0 * (rect.width + rect.height)
        if bool(np.any(bad & (lens * P <= 4.0 * _EPS_MACH
                              * (1.0 + np.abs(z))))):
            raise _BoundaryNearZero

        tmid = np.mod(t[bad] + 0.5 * lens[bad], 1.0)
        if t.size + tmid.size > max_samples:
            raise ResolutionError(
                f"boundary refinement exceeded {max_samples} samples")
        znew = _boundary_points(rect, tmid)
        fnew = f(znew)
        t = np.concatenate([t, tmid])
        order = np.argsort(t, kind="stable")
        t = t[order]
        z = np.concatenate([z, znew])[order]
        fz = np.concatenate([fz, fnew])[order]
        if fprime is not None:
            ratio = np.concatenate([ratio, fprime(znew)])[order]
    raise ResolutionError(
        f"boundary refinement did not settle in {max_depth} rounds on {rect}")


def _count_with_inflation(f, fprime, rect, boundary_tol, max_depth,
                          inflate_tries=3):
    base = _INFLATE_FRACTION * rect.diag
    for attempt in range(inflate_tries + 1):
        grown = rect if attempt == 0 else rect.inflate(attempt * base)
        try:
            return _winding_count(f, fprime, grown, boundary_tol,
                                  max_depth), grown
        except _BoundaryNearZero:
            continue
    raise BoundaryZeroError(
        f"a zero sits on the boundary of {rect} and {inflate_tries} "
        f"inflation retries did not clear it")


def count_zeros(f, rect, fprime=None, boundary_tol=1e-13, max_depth=96):
    """Number of zeros of f in rect, counted with multiplicity.

    ``f`` must be analytic on a neighbourhood of the closed rectangle and
    nonzero on its boundary; a root estimated (via |f|/|f'|) to lie within
    ``boundary_tol`` times the diagonal of the contour triggers up to three
    retries on a rectangle inflated by 1e-6 of the diagonal per attempt (the
    count then refers to the inflated rectangle), after which
    ``BoundaryZeroError`` is raised.
    """
    count, _ = _count_with_inflation(f, fprime, rect, boundary_tol, max_depth)
    return count


def _split(f, fprime, rect, count, boundary_tol, max_depth):
    """Split rect into 2 or 4 children whose counts sum to count.

    Near-square cells are quadrisected; cells with aspect ratio beyond 2 are
    bisected across the long axis (spectral windows are extreme strips and
    quadrisection would waste a dimension).  Split lines are jittered when a
    child count fails to add up, which moves the lines off any root they
    grazed.
    """
    w, h = rect.width, rect.height
    mismatched = False
    for jit in _JITTERS:
        xs = [rect.re_min, rect.re_max]
        ys = [rect.im_min, rect.im_max]
        if w > 2.0 * h:
            xs = [rect.re_min, rect.re_min + (0.5 + jit) * w, rect.re_max]
        elif h > 2.0 * w:
            ys = [rect.im_min, rect.im_min + (0.5 + jit) * h, rect.im_max]
        else:
            xs = [rect.re_min, rect.re_min + (0.5 + jit) * w, rect.re_max]
            ys = [rect.im_min, rect.im_min + (0.5 + jit) * h, rect.im_max]
        children = [Rectangle(xs[i], xs[i + 1], ys[j], ys[j + 1])
                    for i in range(len(xs) - 1) for j in range(len(ys) - 1)]
        try:
            counted = [(c, _winding_count(f, fprime, c, boundary_tol,
                                          max_depth)) for c in children]
        except _BoundaryNearZero:
            continue
        if sum(cnt for _, cnt in counted) == count:
            return counted
        mismatched = True
    if not mismatched:
        # every jitter hit a (noise) zero on its split line: the cell's
        # zeros cannot be separated in double precision
        raise _UnsplittableCell
    raise ResolutionError(
        f"child counts never matched the parent count {count} on {rect}")


def _newton_batch(f, fprime, z0, half_w, half_h, tol, maxit, mult=None):
    """Vectorized Newton (or secant) polish with per-point escape leashes.

    ``mult`` (per-point integer, default 1) scales the step to m*f/f', the
    variant that restores quadratic convergence on an m-fold root.  For
    m > 1 the convergence test uses a floor at the m-fold noise radius
    times the local scale: below that distance the value of f is
    evaluation noise and no smaller step can be certified.
    """
    z = z0.copy()
    active = np.ones(z.size, bool)
    converged = np.zeros(z.size, bool)
    if mult is None:
        mult = np.ones(z.size)
    else:
        mult = np.asarray(mult, np.float64)
    # the m-scaled step of a noisy m-fold root bottoms out near twice the
    # noise radius (the noise term eta/(A delta^(m-1)) grows again below
    # it), so certification needs headroom above that turning point
    floors = np.array([4.0 * _noise_radius(m) for m in mult])
    step_tol = np.where(mult > 1.0,
                        np.maximum(tol, floors * (1.0 + np.abs(z0))),
                        tol)
    secant = fprime is None
    if secant:
        zprev = z0 + (half_w * 1e-3 + tol) + 1j * (half_h * 1e-3 + tol)
        fprev = f(zprev)
    for _ in range(maxit):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        zi = z[idx]
        fz = f(zi)
        if secant:
            denom = fz - fprev[idx]
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(denom != 0, fz * (zi - zprev[idx]) / denom, np.inf)
        else:
            dfz = fprime(zi)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(dfz != 0, fz / dfz, np.inf)
        step = mult[idx] * step
        ok = np.isfinite(step)
        znew = zi - np.where(ok, step, 0.0)
        drift = znew - z0[idx]
        # the leash extends past the cell by the certification floor: a
        # cluster cell counted through near-noise boundary data may hold
        # its root just outside the exact cell
        escaped = (~ok
                   | (np.abs(drift.real) > 1.1 * half_w[idx] + step_tol[idx])
                   | (np.abs(drift.imag) > 1.1 * half_h[idx] + step_tol[idx]))
        done = ok & ~escaped & (np.abs(step) < step_tol[idx])
        if secant:
            zprev[idx] = zi
            fprev[idx] = fz
        z[idx] = np.where(escaped, zi, znew)
        converged[idx[done]] = True
        active[idx[done | escaped]] = False
    return z, converged


def find_roots(f, rect, fprime=None, tol=1e-9, boundary_tol=1e-13,
               max_depth=96, newton_maxit=50, max_passes=200):
    """All zeros of f in rect, with multiplicities summing to the count.

    Returns a list of ``RootResult`` sorted by (real, imag).  Roots closer
    than ``tol`` merge into one entry (multiplicities added, location taken
    from the member with the smallest residual).  If a zero sits on the
    requested boundary the rectangle is inflated as in ``count_zeros`` and
    results refer to the inflated window.
    """
    total, base = _count_with_inflation(f, fprime, rect, boundary_tol,
                                        max_depth)
    if total == 0:
        return []

    found = []  # (location, multiplicity, converged)
    work = [(base, total, False)]
    for _ in range(max_passes):
        if not work:
            break
        singles, clusters, stack = [], [], work
        work = []
        while stack:
            cell, cnt, force = stack.pop()
            if cnt == 0:
                continue
            # a cell holding a few zeros stops splitting near the cluster
            # resolution limit: the noise zone of an m-fold root has radius
            # ~ (machine eps)^(1/m) and split lines (jittered by a few
            # percent of the cell) can no longer avoid it reliably once the
            # cell is within a small factor of that radius.  The early stop
            # only applies to low-order clusters: for larger counts that
            # radius would dwarf genuine root spacings (dense spectra put
            # hundreds of separated roots in one window), so those cells
            # keep subdividing and a true high-order root is still caught
            # by the unsplittable-cell fallback below
            stop = max(tol, 8.0 * _noise_radius(cnt)
                       * (1.0 + abs(cell.center))) if 2 <= cnt <= 3 else tol
            if cell.diag < stop:
                clusters.append((cell, cnt))
            elif cnt == 1 and not force:
                singles.append(cell)
            else:
                try:
                    for child, ccnt in _split(f, fprime, cell, cnt,
                                              boundary_tol, max_depth):
                        if ccnt:
                            stack.append((child, ccnt, False))
                except _UnsplittableCell:
                    clusters.append((cell, cnt))

        if singles:
            centers = np.array([c.center for c in singles])
            hw = np.array([0.5 * c.width for c in singles])
            hh = np.array([0.5 * c.height for c in singles])
            roots, conv = _newton_batch(f, fprime, centers, hw, hh,
                                        tol, newton_maxit)
            for cell, root, ok in zip(singles, roots, conv):
                if ok and cell.contains(root):
                    found.append((complex(root), 1, True))
                elif cell.diag < max(tol, MULTI_ROOT_RES
                                     * (1.0 + abs(cell.center))):
                    # already at the evaluation-noise scale: accept the best
                    # available point instead of splitting into noise
                    loc = complex(root) if cell.contains(root, slack=tol) \
                        else cell.center
                    found.append((loc, 1, False))
                else:
                    work.append((cell, 1, True))
        if clusters:
            centers = np.array([c.center for c, _ in clusters])
            hw = np.array([0.5 * c.width for c, _ in clusters])
            hh = np.array([0.5 * c.height for c, _ in clusters])
            mults = np.array([cnt for _, cnt in clusters])
            multi = mults > 1
            roots = centers.copy()
            conv = np.zeros(len(clusters), bool)
            if (~multi).any():
                i = np.nonzero(~multi)[0]
                roots[i], conv[i] = _newton_batch(
                    f, fprime, centers[i], hw[i], hh[i], tol, newton_maxit)
            if multi.any():
                i = np.nonzero(multi)[0]
                if fprime is not None:
                    # an m-fold zero of f is an (m-1)-fold zero of f', which
                    # is better conditioned by one noise-radius order; for
                    # m = 2 it is a simple zero, locatable to full precision
                    roots[i], conv[i] = _newton_batch(
                        fprime, None, centers[i], hw[i], hh[i], tol,
                        newton_maxit, mult=np.maximum(mults[i] - 1, 1))
                else:
                    roots[i], conv[i] = _newton_batch(
                        f, None, centers[i], hw[i], hh[i], tol,
                        newton_maxit, mult=mults[i])
            slack = np.maximum(tol, 8.0 * np.array(
                [_noise_radius(m) for m in mults]) * (1.0 + np.abs(centers)))
            for (cell, cnt), root, ok, sl in zip(clusters, roots, conv, slack):
                loc = complex(root) if ok and cell.contains(root, slack=sl) \
                    else cell.center
                found.append((loc, cnt, bool(ok)))
    else:
        raise ResolutionError(f"root isolation did not finish in "
                              f"{max_passes} passes on {rect}")

    locs = np.array([loc for loc, _, _ in found])
    residuals = np.abs(f(locs))
    _, _, labels = cluster_points(locs, radius=tol)
    merged = {}
    for i, (loc, mult, conv) in enumerate(found):
        lab = int(labels[i])
        entry = merged.setdefault(lab, [loc, 0, float("inf"), False])
        entry[1] += mult
        if residuals[i] < entry[2]:
            entry[0], entry[2] = loc, float(residuals[i])
        entry[3] = entry[3] or conv
    results = [RootResult(location=e[0], multiplicity=e[1], residual=e[2],
                          newton_converged=e[3]) for e in merged.values()]
    results.sort(key=lambda r: (r.location.real, r.location.imag))

    if sum(r.multiplicity for r in results) != total:
        raise ResolutionError(
            f"located multiplicities do not sum to the boundary count "
            f"{total} on {rect}")
    return results
