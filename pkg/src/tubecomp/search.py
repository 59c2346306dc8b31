"""Deterministic supremum search over regions of H^n.

Scrambled-Sobol starts in the region's unit-cube parameterization, followed
by Nelder-Mead refinement of the best starts.  Objectives are log-scale
(log of the quantity whose supremum is wanted); -inf and NaN mark invalid
or zero points.  Externally supplied points are always evaluated exactly
and participate in the final reduction, so the reported value can never
fall below the objective at an injected point.
"""

import math
from collections import namedtuple

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

SearchBudget = namedtuple("SearchBudget", ["starts", "refine_steps"])
DEFAULT_BUDGET = SearchBudget(64, 200)

SearchResult = namedtuple("SearchResult", ["log_value", "coords", "samples_used", "converged"])

_REFINE_TOP = 8


def _coords_key(coords):
    return tuple((c.real, c.imag) for c in coords)


def maximize(objective_vec, region, budget=DEFAULT_BUDGET, seed=0, inject=()):
    """Maximize a log-scale objective over a region.

    objective_vec maps an (m, n) complex array to (m,) log-values.  inject
    is an iterable of points (TubePoint or coordinate sequences) evaluated
    exactly and used as extra refinement starts.  Deterministic for fixed
    (seed, budget, inject); reduction is an order-independent max with a
    lexicographic coordinate tie-break.
    """
    starts, refine_steps = budget
    if starts < 1:
        raise ValueError("search budget needs at least one start, got %r" % (starts,))

    def value_at(P):
        vals = np.asarray(objective_vec(P), dtype=float)
        vals = np.where(np.isnan(vals), -np.inf, vals)
        return np.where(region.contains(P), vals, -np.inf)

    def scalar_value(coords):
        return float(value_at(np.asarray(coords, dtype=complex).reshape(1, -1))[0])

    sob = qmc.Sobol(d=region.param_dim, scramble=True, seed=seed)
    U = sob.random_base2(max(0, math.ceil(math.log2(max(1, starts)))))[:starts]
    P = region.to_points(U)
    vals = value_at(P)
    used = starts

    candidates = []  # (log value, coords tuple, cube params or None)
    order = np.argsort(vals)[::-1]
    for idx in order[: _REFINE_TOP * 2]:
        candidates.append((float(vals[idx]), tuple(P[idx]), U[idx]))

    feasible = int(np.sum(vals > -np.inf))
    for p in inject:
        coords = tuple(p)
        val = scalar_value(coords)
        used += 1
        if val > -np.inf:
            feasible += 1
        candidates.append((val, coords, region.from_point(p)))

    if feasible == 0 and not np.any(region.contains(P)) and not inject:
        raise ValueError("empty region: no sample point landed in %r" % (region,))

    refine = sorted(candidates, key=lambda c: (-c[0], _coords_key(c[1])))[:_REFINE_TOP]
    results = list(candidates)
    all_success = True
    ran_refinement = False
    if refine_steps > 0:
        for val0, coords0, u0 in refine:
            if not (val0 > -np.inf):
                continue
            ran_refinement = True

            def neg_obj(u):
                if np.any(u < 0.0) or np.any(u > 1.0):
                    return np.inf
                pt = region.to_points(u.reshape(1, -1))
                v = value_at(pt)[0]
                return -v if v > -np.inf else np.inf

            res = minimize(
                neg_obj,
                np.asarray(u0, dtype=float),
                method="Nelder-Mead",
                options={
                    "maxiter": refine_steps,
                    "maxfev": refine_steps,
                    "xatol": 1e-10,
                    "fatol": 1e-13,
                },
            )
            used += int(res.nfev)
            all_success = all_success and bool(res.success)
            if np.isfinite(res.fun):
                pt = region.to_points(np.clip(res.x, 0.0, 1.0).reshape(1, -1))
                results.append((float(-res.fun), tuple(pt[0]), None))

    best_val, best_coords = -np.inf, None
    for val, coords, _ in results:
        if best_coords is None or val > best_val or (
            val == best_val and _coords_key(coords) < _coords_key(best_coords)
        ):
            best_val, best_coords = val, coords

    converged = all_success if ran_refinement else True
    return SearchResult(best_val, best_coords, used, converged)
