"""Deterministic derivative-free constrained maximization.

Coarse grid screening followed by compass pattern search from the best grid
points.  Objectives here contain entropies whose derivatives blow up at the
purity boundary, so no gradients are used.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SearchBox:
    lower: np.ndarray
    upper: np.ndarray
    grid_points_per_dim: int = 5

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or np.any(lo > hi):
            raise ValueError("need lower <= upper componentwise, same length")
        if self.grid_points_per_dim < 1:
            raise ValueError("grid_points_per_dim must be positive")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def ndim(self) -> int:
        return len(self.lower)

    @property
    def pitch(self) -> np.ndarray:
        n = self.grid_points_per_dim
        return (self.upper - self.lower) / max(n - 1, 1)

    def grid(self) -> np.ndarray:
        """All grid points, in lexicographic order."""
        n = self.grid_points_per_dim
        axes = [np.linspace(l, u, n) if n > 1 else np.array([(l + u) / 2])
                for l, u in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class OptimizationResult:
    point: np.ndarray
    objective: float
    feasible: bool
    evaluations: int
    constraint: float = float("nan")
    converged: bool = True
    grid_best: float = float("nan")
    starts: list = field(default_factory=list, compare=False)


class _Evaluator:
    def __init__(self, objective, constraint, budget, vectorized):
        self.objective = objective
        self.constraint = constraint
        self.budget = budget
        self.vectorized = vectorized
        self.count = 0

    def __call__(self, X):
        X = np.atleast_2d(X)
        self.count += len(X)
        if self.vectorized:
            f = np.asarray(self.objective(X), dtype=float).reshape(len(X))
            g = (np.zeros(len(X)) if self.constraint is None
                 else np.asarray(self.constraint(X), dtype=float).reshape(len(X)) - self.budget)
        else:
            f = np.array([self.objective(x) for x in X], dtype=float)
            g = (np.zeros(len(X)) if self.constraint is None
                 else np.array([self.constraint(x) for x in X], dtype=float) - self.budget)
        f = np.where(np.isnan(f), -np.inf, f)
        g = np.where(np.isnan(g), np.inf, g)
        return f, g


def _pick_best(points, values):
    """Index of the largest value; ties go to the lexicographically smallest point."""
    best = None
    for i in np.flatnonzero(values == values.max()):
        if best is None or tuple(points[i]) < tuple(points[best]):
            best = i
    return best


def _contract(ev, x, cands, n_bisect):
    """Pull infeasible candidates toward feasible ``x``; return feasible points (or x)."""
    lo = np.zeros(len(cands))
    hi = np.ones(len(cands))
    f_lo = np.full(len(cands), -np.inf)
    for _ in range(n_bisect):
        mid = (lo + hi) / 2
        P = x + mid[:, None] * (cands - x)
        f, g = ev(P)
        ok = g <= 0
        lo = np.where(ok, mid, lo)
        f_lo = np.where(ok, f, f_lo)
        hi = np.where(ok, hi, mid)
    return x + lo[:, None] * (cands - x), f_lo, lo > 0


def pattern_search(ev, box, x, fx, *, min_step=1e-6, max_iter=20000, n_bisect=8, tol=0.0):
    """Compass search with complete polling and step halving.

    ``x`` must be feasible.  Returns ``(x, fx, converged)``.
    """
    step = box.pitch.copy()
    active = step > 0
    it = 0
    while step.max() >= min_step:
        if it >= max_iter:
            return x, fx, False
        it += 1
        dirs = np.concatenate([np.diag(step), -np.diag(step)])[np.concatenate([active, active])]
        cands = box.clip(x + dirs)
        moved = np.any(cands != x, axis=1)
        cands = cands[moved]
        if len(cands) == 0:
            step = step / 2
            continue
        f, g = ev(cands)
        bad = g > 0
        if np.any(bad):
            pulled, f_pulled, ok = _contract(ev, x, cands[bad], n_bisect)
            cands[bad] = pulled
            f[bad] = np.where(ok, f_pulled, -np.inf)
        improving = f > fx + tol
        if np.any(improving):
            idx = np.flatnonzero(improving)
            k = idx[_pick_best(cands[idx], f[idx])]
            x, fx = cands[k].copy(), float(f[k])
        else:
            step = step / 2
    return x, fx, True


def maximize(objective, constraint=None, budget=0.0, box: SearchBox | None = None, *,
             starts=(), n_starts=5, min_step=1e-6, max_iter=20000, n_bisect=8,
             vectorized=False, tol=0.0) -> OptimizationResult:
    """Maximize ``objective`` over ``box`` subject to ``constraint(x) <= budget``.

    The box grid is screened first; the ``n_starts`` best feasible grid
    points plus any feasible ``starts`` seed independent pattern searches.
    Infeasible poll points are pulled back toward the incumbent by
    ``n_bisect`` bisection steps.  With ``vectorized=True`` both callables
    receive ``(n, d)`` arrays.  Identical inputs give bit-identical output.
    """
    if box is None:
        raise ValueError("a SearchBox is required")
    ev = _Evaluator(objective, constraint, budget, vectorized)
    G = box.grid()
    f, g = ev(G)
    feas = g <= 0
    if not np.any(feas):
        k = int(np.argmin(g))
        return OptimizationResult(G[k], float(f[k]), False, ev.count, float(g[k] + budget), False)

    order = sorted(np.flatnonzero(feas), key=lambda i: (-f[i], tuple(G[i])))
    grid_best = float(f[order[0]])
    seeds = [(G[i], float(f[i])) for i in order[:n_starts]]
    if len(starts):
        S = box.clip(np.atleast_2d(np.asarray(starts, dtype=float)))
        fs, gs = ev(S)
        seeds += [(S[i], float(fs[i])) for i in range(len(S)) if gs[i] <= 0]

    results = []
    converged = True
    for x0, f0 in seeds:
        x, fx, ok = pattern_search(ev, box, x0.copy(), f0, min_step=min_step,
                                   max_iter=max_iter, n_bisect=n_bisect, tol=tol)
        converged &= ok
        results.append((x, fx))

    pts = np.array([r[0] for r in results])
    vals = np.array([r[1] for r in results])
    k = _pick_best(pts, vals)
    _, g_best = ev(pts[k:k + 1])
    return OptimizationResult(pts[k], float(vals[k]), True, ev.count, float(g_best[0] + budget),
                              converged, grid_best, [tuple(s[0]) for s in seeds])
