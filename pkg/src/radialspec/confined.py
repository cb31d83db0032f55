"""Spectrum of a potential enclosed by an impenetrable wall at r = R.

The hard wall imposes u(R, lam) = 0, so the bound-state energies are
the lam-roots of the truncated series evaluated at R.  Each root is
stabilized in the truncation order: K grows geometrically until the
roots stop moving at the requested tolerance, which also filters the
spurious roots a too-short truncation can plant near the window top.
States are labeled by the node count of u(r) on (0, R), not by root
index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp

from .arith import CONFINED_DPS, to_mpf, working_dps
from .errors import ConfinementError, ConvergenceError, PrecisionError, ResolutionError
from .roots import channel_floor, count_u_cells, find_u_roots, level_spacing_scale
from .series import SeriesEvaluator, node_count

__all__ = ["ConfinedResult", "SweepTable", "solve_confined", "r_sweep"]


@dataclass(frozen=True)
class ConfinedResult:
    """Wall-confined levels: (n, l, lam) triples plus provenance."""

    states: tuple
    R: object
    K_used: int
    precision: int

    def energy(self, n):
        for state in self.states:
            if state[0] == n:
                return state[2]
        raise KeyError("state n=%d not contained in this result" % n)


@dataclass(frozen=True)
class SweepTable:
    """Confined spectra over a list of radii, with the global-ground
    column lam_00(R) for excitation plots."""

    l: float
    results: tuple
    ground: tuple  # lam_00(R) per radius

    def rows(self):
        for res, g in zip(self.results, self.ground):
            for n, l, lam in res.states:
                yield (res.R, n, l, lam, lam - g)


def _default_dps(tol):
    digits = max(8, int(-math.log10(float(tol))) + 2)
    return max(CONFINED_DPS, digits + 14)


def _grid_for(lo, hi, R, cap=8192):
    """Grid sized so a cell is a fraction of the box-level spacing."""
    cell = level_spacing_scale(R) / 3.0
    return max(24, min(cap, int(math.ceil((float(hi) - float(lo)) / cell))))


def _scan_lowest(ev, R, n_states, target, grid, window):
    """Lowest n_states+1 hard-wall roots, extending the window upward.

    The window grows from the channel floor in steps scaled to the
    box-level spacing; once enough roots are found the count is checked
    against a doubled grid so that close pairs cannot hide in one cell.
    """
    with working_dps(ev.dps):
        rad = ev.radius(R)
        want = n_states + 1  # one spare protects the top root
        if window is not None:
            lo = to_mpf(window[0])
            hi = to_mpf(window[1])
            n = grid or _grid_for(lo, hi, R)
            return find_u_roots(rad, lo, hi, n, target)[:want]
        lo = to_mpf(channel_floor(ev.potential, ev.channel.l, float(R)))
        span0 = max(4.0 * level_spacing_scale(R), 1.0)
        hi = lo + span0
        for _ in range(80):
            n = _grid_for(lo, hi, R)
            roots = find_u_roots(rad, lo, hi, n, target, limit=want)
            if len(roots) >= want:
                # recount on doubled grids until stable, in case a close
                # pair of levels hid inside one cell
                sub_hi = roots[want - 1].value() + (hi - lo) / n
                cnt = want
                stable = False
                for _ in range(5):
                    n *= 2
                    c2 = count_u_cells(rad, lo, sub_hi, n)
                    if c2 == cnt:
                        stable = True
                        break
                    cnt = c2
                    roots = find_u_roots(rad, lo, hi, n, target, limit=want)
                    sub_hi = roots[want - 1].value() + (hi - lo) / n
                if not stable:
                    raise ResolutionError(
                        "wall-level count kept changing under grid refinement"
                    )
                return roots[:want]
            hi = hi + max((hi - lo) * mp.mpf("0.6"), span0)
        raise ConvergenceError(
            "could not find %d wall levels below lam=%s" % (want, mp.nstr(hi, 8))
        )


def solve_confined(potential, l, R, n_states, tol, K0=40, K_ceiling=400,
                   dps=None, initial_grid=None, window=None):
    """Lowest n_states wall-confined levels, K-stabilized to ``tol``.

    The truncation order starts at K0 and is multiplied by 1.5 until
    every retained root moves by less than tol/4 between consecutive
    orders; :class:`ConvergenceError` is raised when the ceiling is hit
    first.  Root labels come from counting radial nodes.
    """
    if n_states < 1:
        raise ValueError("n_states must be >= 1")
    if not float(R) < potential.rho_V:
        raise ConfinementError(
            "confinement radius %s reaches the expansion radius rho_V=%s"
            % (R, potential.rho_V)
        )
    dps = dps or _default_dps(tol)
    grid = initial_grid or max(32, 8 * (n_states + 1))
    retries = 0
    K = int(K0)
    while True:
        try:
            return _solve_confined_at_dps(potential, l, R, n_states, tol, K,
                                          K_ceiling, dps, grid, window)
        except PrecisionError:
            retries += 1
            if retries > 3:
                raise
            dps += 15


def _solve_confined_at_dps(potential, l, R, n_states, tol, K, K_ceiling,
                           dps, grid, window):
    with working_dps(dps):
        tol_m = to_mpf(tol)
        # refine beyond tol but never past the working-precision floor
        target = max(tol_m / 20, mp.mpf(10) ** (-(dps - 8)))
        match_tol = tol_m / 4

        def roots_at(K):
            ev = SeriesEvaluator(potential, l, K, dps)
            return ev, [r.value() for r in
                        _scan_lowest(ev, R, n_states, target, grid, window)]

        ev, prev = roots_at(K)
        while True:
            K2 = min(int(math.ceil(K * 1.5)), K_ceiling)
            if K2 <= K:
                raise ConvergenceError(
                    "levels did not stabilize before the truncation ceiling "
                    "K=%d" % K_ceiling
                )
            ev2, cur = roots_at(K2)
            stable = (len(cur) >= len(prev) and
                      all(abs(a - b) < match_tol
                          for a, b in zip(prev, cur[:len(prev)])))
            if stable:
                K = K2
                ev = ev2
                break
            prev, K, ev = cur, K2, ev2

        levels = cur[:n_states + 1]
        states = []
        for lam in levels[:n_states]:
            table = ev.table(lam)
            n = node_count(table, None, R, grid_points=64, dps=dps)
            states.append((n, l, lam))
        labels = [s[0] for s in states]
        if labels != list(range(n_states)):
            raise ResolutionError(
                "node labels %s are not the contiguous range 0..%d; "
                "a level was missed or merged" % (labels, n_states - 1)
            )
        return ConfinedResult(states=tuple(states), R=to_mpf(R), K_used=K,
                              precision=dps)


def r_sweep(potential, l, n_states, R_list, tol, **kwargs):
    """Confined spectra over a radius list, plus the lam_00 baseline.

    Returns a :class:`SweepTable` whose rows carry both the levels and
    their excitation energies relative to the l=0 ground state at the
    same radius.
    """
    results = []
    ground = []
    K_warm = kwargs.pop("K0", 40)
    for R in R_list:
        res = solve_confined(potential, l, R, n_states, tol, K0=K_warm,
                             **kwargs)
        K_warm = max(40, int(res.K_used / 1.5))
        results.append(res)
        if l == 0:
            ground.append(res.states[0][2])
        else:
            base = solve_confined(potential, 0, R, 1, tol, K0=K_warm, **kwargs)
            ground.append(base.states[0][2])
    return SweepTable(l=l, results=tuple(results), ground=tuple(ground))
