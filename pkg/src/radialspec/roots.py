"""Real-root location for the quantization conditions in the energy variable.

Both boundary conditions -- the hard wall u(R, lam) = 0 and the
derivative condition (slope: zero of d/dr of the series factor) -- are
smooth functions of lam whose real roots strictly alternate:

    slope_0 < u_0 < slope_1 < u_1 < ...

Roots are located by a sign scan on a lam grid followed by plain
bisection, which stays robust at truncation orders where the polynomial
coefficient form of u(R, lam) would be hopelessly ill-conditioned.  The
alternation is exploited constructively: u-roots are found by scanning,
and each derivative root is then pinned inside one gap between
consecutive u-roots, so the returned sets interleave by construction or
an :class:`InterleaveError` is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp

from .arith import GUARD_DIGITS, to_mpf, working_dps
from .errors import InterleaveError, PrecisionError
from .series import SeriesEvaluator, _float

__all__ = ["RootSet", "RootStability", "scan_roots", "root_stability",
           "polynomial_roots", "default_window"]


def channel_floor(potential, l, R):
    """Float lower bound for every level of the channel (potential, l).

    Combines the exact ground energy of the singular 1/r**2 + 1/r part
    (which is what makes the sampled min of V_eff useless when an
    attractive Coulomb term drives it to -inf) with the minimum of the
    regular part over (0, R), minus one unit of padding.
    """
    Rf = float(R)
    coulomb = 0.0
    d1 = _float(potential.d_m1)
    if d1 < 0.0:
        disc = math.sqrt(8.0 * _float(potential.d_m2) + (1.0 + 2.0 * l) ** 2)
        coulomb = -2.0 * d1 * d1 / (1.0 + disc) ** 2
    vreg_min = 0.0
    if potential.regular:
        for k in range(1, 257):
            vreg_min = min(vreg_min, float(potential.v_reg(Rf * k / 256.0)))
    analytic = coulomb + vreg_min - 1.0
    sampled = potential.v_eff_min_float(l, Rf) * 1.05 - 1.0
    if math.isfinite(sampled):
        return max(analytic, sampled)
    return analytic


def level_spacing_scale(R):
    """Box-level spacing scale pi**2/(2R**2): the natural grid cell size."""
    return math.pi**2 / (2.0 * float(R) ** 2)


def default_window(potential, l, R):
    """Default scan window (floor, V_eff(R, l)) as floats.

    The top is the effective-potential height at the matching radius,
    below which wall levels track unconfined ones; solvers extend it
    upward when they need states beyond it.
    """
    return channel_floor(potential, l, R), potential.v_eff_float(float(R), l)


@dataclass(frozen=True)
class RootSet:
    """Ascending refined roots of one condition kind inside a window."""

    roots: tuple
    kind: str
    window: tuple
    R: object
    K: int
    precision: int
    widths: tuple


@dataclass(frozen=True)
class RootStability:
    """Distance between a root and its partner at a higher truncation."""

    root: object
    delta: object
    matched: bool
    spurious: bool


class _Isolated:
    """A refined root interval (lo, hi); value() is the midpoint."""

    __slots__ = ("lo", "hi", "clean")

    def __init__(self, lo, hi, clean=True):
        self.lo = lo
        self.hi = hi
        self.clean = clean

    def value(self):
        return (self.lo + self.hi) / 2

    def width(self):
        return self.hi - self.lo


def _bisect(rad, kind, lo, hi, s_lo, target):
    """Shrink a sign-change interval by bisection.

    Stops at the target width, or earlier when the condition value at
    the midpoint falls below the roundoff noise floor (the root is then
    resolved as far as this precision allows).
    """
    clean = True
    # enough iterations to go from the current width to the target
    span = hi - lo
    if span <= 0:
        return _Isolated(lo, hi)
    it = int(mp.log(span / target, 2)) + 4 if target < span else 1
    for _ in range(max(it, 1)):
        if hi - lo <= target:
            break
        mid = (lo + hi) / 2
        s = rad.sign(mid, kind)
        if s == 0:
            clean = False
            break
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return _Isolated(lo, hi, clean)


def _grid_signs(rad, kind, xs):
    """Signs at grid points; exact/noisy zeros nudged once, then kept."""
    out = []
    for j, x in enumerate(xs):
        s = rad.sign(x, kind)
        if s == 0:
            # tie-break: nudge by a sliver of the local cell
            if j + 1 < len(xs):
                step = (xs[j + 1] - x) * mp.mpf("1e-9")
            else:
                step = (x - xs[j - 1]) * mp.mpf("1e-9")
            s = rad.sign(x + step, kind)
        out.append(s)
    return out


def _scan_intervals(rad, kind, lo, hi, n):
    """Sign-change cells of one condition on a uniform n-cell grid.

    A grid point still at zero after the nudge is accepted as an exact
    root (zero-width cell).
    """
    xs = [lo + (hi - lo) * j / n for j in range(n + 1)]
    sg = _grid_signs(rad, kind, xs)
    cells = []
    prev_sign = 0
    prev_x = None
    for x, s in zip(xs, sg):
        if s == 0:
            cells.append((x, x, 0))  # exact root at a grid point
            continue
        if prev_sign != 0 and s != prev_sign:
            cells.append((prev_x, x, prev_sign))
        prev_sign = s
        prev_x = x
    return cells


def find_u_roots(rad, lo, hi, n, target, limit=None):
    """Refined hard-wall roots in (lo, hi), ascending."""
    roots = []
    for a, b, s in _scan_intervals(rad, "u", lo, hi, n):
        if a == b:
            roots.append(_Isolated(a, b))
        else:
            roots.append(_bisect(rad, "u", a, b, s, target))
        if limit is not None and len(roots) >= limit:
            break
    return roots


def count_u_cells(rad, lo, hi, n):
    """Number of isolated hard-wall sign-change cells (no refinement)."""
    return len(_scan_intervals(rad, "u", lo, hi, n))


def _du_sign_near(rad, x, side, scale):
    """Trusted slope sign at x, stepping away along ``side`` if noisy."""
    s = rad.sign(x, "du")
    step = scale * mp.mpf("1e-12")
    tries = 0
    while s == 0 and tries < 60:
        x = x + side * step
        s = rad.sign(x, "du")
        step *= 4
        tries += 1
    return s, x


def du_root_in_gap(rad, a, b, target):
    """The single slope root inside the gap (a, b), or None.

    a and b are consecutive hard-wall roots (or window edges); by the
    alternation property the slope changes sign at most once between
    them, so comparing the endpoint signs decides existence and a plain
    bisection pins it down.
    """
    scale = max(abs(a), abs(b), mp.mpf(1))
    sa, xa = _du_sign_near(rad, a, +1, scale)
    sb, xb = _du_sign_near(rad, b, -1, scale)
    if sa == 0 or sb == 0:
        raise PrecisionError(
            "slope condition unresolvable near the gap (%s, %s); raise dps"
            % (mp.nstr(a, 10), mp.nstr(b, 10))
        )
    if xa >= xb:
        # endpoints collapsed: the pair is tighter than the working
        # resolution; report the gap itself
        return _Isolated(a, b, clean=False)
    if sa == sb:
        return None
    return _bisect(rad, "du", xa, xb, sa, target)


def scan_bracket_pairs(rad, lo, hi, n, target, need_pairs=None):
    """u-roots and their partner slope roots inside (lo, hi).

    Returns (u_roots, du_below): lists of the same length, where
    ``du_below[i]`` is the slope root in the gap just below
    ``u_roots[i]`` (None only allowed for i=0, when the window bottom
    sits above the first slope root).  Each interior gap between
    consecutive u-roots must hold exactly one slope root -- that is the
    interleaving pattern -- so a missing one raises
    :class:`InterleaveError` after a grid-doubling retry in case an
    unresolved close u-pair was the real culprit.
    """
    for attempt in range(5):
        u_roots = find_u_roots(rad, lo, hi, n, target,
                               limit=need_pairs)
        if need_pairs is not None:
            if len(u_roots) < need_pairs:
                return u_roots, []  # caller widens the window / grows R
            u_roots = u_roots[:need_pairs]
        du_below = []
        ok = True
        edges = [lo] + [r.value() for r in u_roots]
        for idx in range(len(edges) - 1):
            a, b = edges[idx], edges[idx + 1]
            got = du_root_in_gap(rad, a, b, target)
            if got is None and idx > 0:
                ok = False
                break
            du_below.append(got)
        if ok:
            return u_roots, du_below
        n *= 2
    raise InterleaveError(
        "value/derivative roots failed to interleave on (%s, %s); "
        "raise the truncation order" % (mp.nstr(lo, 8), mp.nstr(hi, 8))
    )


def _evaluator(series, dps):
    return SeriesEvaluator(series.potential, series.channel.l, series.K,
                           dps or series.dps)


def scan_roots(series, R, window, kind, initial_grid=64, refine_to=None,
               dps=None):
    """All roots of one condition kind in a finite window.

    Both condition kinds are scanned so the interleaving pattern can be
    verified; the requested kind is returned as a :class:`RootSet`.
    Roots are refined to ``refine_to`` (default: the working-precision
    width 10**-(dps - guard)).
    """
    if initial_grid < 8:
        initial_grid = 8
    dps = dps or series.dps
    ev = _evaluator(series, dps)
    with working_dps(dps):
        lo = to_mpf(window[0])
        hi = to_mpf(window[1])
        if not lo < hi:
            raise ValueError("window must be an increasing pair")
        rad = ev.radius(R)
        target = to_mpf(refine_to) if refine_to else mp.mpf(10) ** (
            -(dps - GUARD_DIGITS))
        u_roots, du_below = scan_bracket_pairs(rad, lo, hi, initial_grid,
                                               target)
        du_roots = [d for d in du_below if d is not None]
        # the top gap (last u-root, hi) may hold one more slope root
        if u_roots:
            extra = du_root_in_gap(rad, u_roots[-1].value(), hi, target)
        else:
            extra = du_root_in_gap(rad, lo, hi, target)
        if extra is not None:
            du_roots.append(extra)
        picked = u_roots if kind == "u" else du_roots
        picked = [r for r in picked if lo <= r.value() <= hi]
        return RootSet(
            roots=tuple(r.value() for r in picked),
            kind=kind,
            window=(lo, hi),
            R=to_mpf(R),
            K=series.K,
            precision=dps,
            widths=tuple(r.width() for r in picked),
        )


def root_stability(series_builder, R, window, kind, K, K2,
                   initial_grid=64, dps=None, tol=None):
    """Per-root movement between truncation orders K and K2 > K.

    Each root found at K is matched to the nearest root at K2 within
    half the spacing to its neighbors; unmatched roots (or, when a
    tolerance is given, roots moving more than it) are flagged spurious
    -- they are truncation artifacts near the window top.
    """
    if K2 <= K:
        raise ValueError("K2 must exceed K")
    set1 = scan_roots(series_builder(K), R, window, kind,
                      initial_grid=initial_grid, dps=dps)
    set2 = scan_roots(series_builder(K2), R, window, kind,
                      initial_grid=initial_grid, dps=dps)
    out = []
    r1 = list(set1.roots)
    r2 = list(set2.roots)
    with working_dps(dps or set1.precision):
        span = set1.window[1] - set1.window[0]
        for idx, r in enumerate(r1):
            gap_lo = r - r1[idx - 1] if idx > 0 else span
            gap_hi = r1[idx + 1] - r if idx + 1 < len(r1) else span
            radius = min(gap_lo, gap_hi) / 2
            if r2:
                nearest = min(r2, key=lambda x: abs(x - r))
                delta = abs(nearest - r)
            else:
                delta = mp.inf
            matched = delta <= radius
            spurious = (not matched) or (tol is not None and delta > tol)
            out.append(RootStability(root=r, delta=delta, matched=matched,
                                     spurious=spurious))
    return out


def polynomial_roots(series, R, window, dps=None):
    """Cross-check path: real roots from the dense polynomial in lam.

    Collapses the lambda-poly table at radius R into a single
    polynomial and asks numpy for all of its roots, keeping the real
    ones inside the window.  Only sane at small K; coefficient-form
    roots of high-degree truncations are ill-conditioned, which is why
    the scanning path above is the default.
    """
    import numpy as np

    if series.mode != "lambda-poly":
        raise ValueError("polynomial_roots needs a lambda-poly series")
    dps = dps or series.dps
    with working_dps(dps):
        R = to_mpf(R)
        x = R**series.potential.step
        deg = max(len(p) for p in series.coeffs)
        acc = [mp.mpf(0)] * deg
        pw = mp.mpf(1)
        for poly in series.coeffs:
            for m, c in enumerate(poly):
                acc[m] += c * pw
            pw *= x
        coeffs = [float(c) for c in acc]
    arr = np.array(coeffs[::-1], dtype=float)
    arr = np.trim_zeros(arr, "f")
    if arr.size <= 1:
        return []
    roots = np.roots(arr)
    lo, hi = float(window[0]), float(window[1])
    real = [float(r.real) for r in roots
            if abs(r.imag) < 1e-8 * max(1.0, abs(r)) and lo <= r.real <= hi]
    return sorted(real)
