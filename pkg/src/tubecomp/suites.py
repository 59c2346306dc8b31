"""Sample-based verification suites for the geometric and growth inequalities.

Each suite draws a deterministic sample cloud, evaluates one inequality
family, and reduces to a single worst-case statistic compared against a cap.
Caps come in two kinds: structural ones that follow from the statements
themselves (strict ratio bounds, membership equivalence, the peak value 1,
the swing cap) and calibrated ones for inequalities that only hold up to an
unspecified constant.  Calibrated suites use a fixed ball radius of 0.5 and
fixed exponent grids; data/calibration.json stores the raw worst statistic
of a large reference run (tools/make_calibration.py) and checks pass while
the fresh statistic stays within CALIBRATION_MARGIN times the stored value.
The suites are regression guards against drift, not proofs.
"""

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .expressions import EvalError
from .growth import (
    as_weight,
    imag_ratio_gap,
    log_weighted_modulus_vec,
    make_f_a,
    make_g_am,
    power_ratio_gap,
    split_bound_gap,
    sup_estimate,
    weighted_lipschitz_ratio,
    weighted_modulus,
)
from .halfplane import (
    Region,
    TubePoint,
    circle_point_vec,
    pseudo_dist_vec,
    polydisc_contains,
    sample_coords,
    sample_in_ball,
)
from .search import SearchBudget

DELTA = 0.5
CALIBRATION_MARGIN = 2.0

# fixed exponent grid cycled through the calibrated ratio suites
_S_GRID = ((0.7, 1.3), (0.25, 4.0), (1.0, 1.0))
_GAMMA2 = (0.7, 1.3)
_SUITE_BUDGET = SearchBudget(16, 40)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    samples: int
    worst: float
    cap: float
    ok: bool
    note: str = ""


def _tp(row):
    return TubePoint(tuple(complex(c) for c in np.atleast_1d(row)))


def _ball_pairs(rng, samples):
    """(z, w) with d(z, w) < DELTA strictly, by construction."""
    z = sample_coords(rng, samples, 1)[:, 0]
    t = DELTA * rng.uniform(0.0, 1.0, samples) * (1.0 - 1e-9)
    theta = rng.uniform(0.0, 2.0 * math.pi, samples)
    return z, circle_point_vec(z, t, theta)


def _strict_ratio_worst(r, delta):
    lo = (1.0 - delta) / (1.0 + delta)
    hi = (1.0 + delta) / (1.0 - delta)
    return max(float(np.max(r / hi)), float(np.max(lo / r)))


def suite_ineq_im_ratio(rng, samples):
    """Im z / Im w lies strictly between (1-d)/(1+d) and (1+d)/(1-d)."""
    z, w = _ball_pairs(rng, samples)
    return _strict_ratio_worst(z.imag / w.imag, DELTA), samples, ""


def suite_ineq_conj_dist(rng, samples):
    """|z - conj w| / (2 Im z) obeys the same strict two-sided bound."""
    z, w = _ball_pairs(rng, samples)
    return _strict_ratio_worst(np.abs(z - np.conj(w)) / (2.0 * z.imag), DELTA), samples, ""


def suite_ineq_point_ratio(rng, samples):
    """|(z - conj a)/(w - conj a)| obeys the bound for every anchor a."""
    z, w = _ball_pairs(rng, samples)
    a = sample_coords(rng, samples, 1)[:, 0]
    return _strict_ratio_worst(np.abs((z - np.conj(a)) / (w - np.conj(a))), DELTA), samples, ""


def suite_polydisc_equivalence(rng, samples):
    """Pseudo-distance membership equals Euclidean polydisc membership.

    Samples within a relative 1e-9 band of any coordinate boundary are
    skipped; there the two strict inequalities may legitimately round apart.
    """
    n = 2
    z = sample_coords(rng, samples, n)
    delta = rng.uniform(0.05, 0.95, (samples, n))
    t = np.minimum(delta * rng.uniform(0.7, 1.3, (samples, n)), 0.995)
    theta = rng.uniform(0.0, 2.0 * math.pi, (samples, n))
    w = circle_point_vec(z, t, theta)
    d = pseudo_dist_vec(z, w)
    near = (np.abs(d - delta) <= 1e-9 * np.maximum(d, delta)).any(axis=1)

    mismatches = 0
    used = 0
    for i in range(samples):
        if near[i]:
            continue
        used += 1
        by_rho = bool((d[i] < delta[i]).all())
        by_disc = polydisc_contains(_tp(z[i]), tuple(delta[i]), _tp(w[i]))
        if by_rho != by_disc:
            mismatches += 1
    return float(mismatches), used, "skipped %d near-boundary" % (samples - used)


def _bump_instances(rng, samples, per=40):
    count = max(1, samples // per)
    for _ in range(count):
        n = int(rng.integers(1, 4))
        gamma = as_weight(tuple(rng.uniform(0.25, 4.0, n)))
        a = _tp(sample_coords(rng, 1, n)[0])
        row = np.array(a.coords, dtype=complex)
        ball = sample_in_ball(rng, np.tile(row, (per // 2, 1)), 0.9)
        box = sample_coords(rng, per - per // 2, n)
        yield a, gamma, np.vstack([ball, box])


def suite_bump_peak(rng, samples):
    """The bump's weighted modulus at its own center is exactly 1."""
    worst = 0.0
    count = 0
    for a, gamma, _ in _bump_instances(rng, samples):
        worst = max(worst, abs(weighted_modulus(make_f_a(a, gamma), gamma, a) - 1.0))
        count += 1
    return worst, count, ""


def suite_bump_sup(rng, samples):
    """The bump's weighted modulus never exceeds its peak value 1."""
    worst = 0.0
    used = 0
    for a, gamma, P in _bump_instances(rng, samples):
        wm = np.exp(log_weighted_modulus_vec(make_f_a(a, gamma), gamma, P))
        worst = max(worst, float(np.max(wm)))
        used += P.shape[0]
    return worst, used, ""


def suite_bump_closed_form(rng, samples):
    """The bump's weighted modulus equals prod (1 - rho_k^2)^{gamma_k}."""
    worst = 0.0
    used = 0
    for a, gamma, P in _bump_instances(rng, samples):
        wm = np.exp(log_weighted_modulus_vec(make_f_a(a, gamma), gamma, P))
        d = pseudo_dist_vec(P, np.array(a.coords, dtype=complex)[None, :])
        closed = np.prod((1.0 - d * d) ** np.asarray(gamma.exponents), axis=1)
        worst = max(worst, float(np.max(np.abs(wm - closed))))
        used += P.shape[0]
    return worst, used, ""


def suite_swing_cap(rng, samples):
    """The swing function's weighted modulus never exceeds 1."""
    worst = 0.0
    used = 0
    for a, gamma, P in _bump_instances(rng, samples):
        m = 1 + int(rng.integers(0, a.n))
        wm = np.exp(log_weighted_modulus_vec(make_g_am(a, m, gamma), gamma, P))
        worst = max(worst, float(np.max(wm)))
        used += P.shape[0]
    return worst, used, ""


def _gap_samples(rng, samples):
    n = 2
    z = sample_coords(rng, samples, n)
    w = sample_in_ball(rng, z, DELTA)
    a = sample_coords(rng, samples, n)
    return z, w, a


def suite_power_ratio_gap(rng, samples):
    """|prod ((z-conj a)/(w-conj a))^s - 1| grows at most linearly in rho."""
    z, w, a = _gap_samples(rng, samples)
    worst = 0.0
    skipped = 0
    for i in range(samples):
        s = _S_GRID[i % len(_S_GRID)]
        try:
            gap = power_ratio_gap(_tp(a[i]), _tp(z[i]), _tp(w[i]), s)
        except (EvalError, ValueError):
            skipped += 1
            continue
        worst = max(worst, gap)
    return worst, samples - skipped, ("skipped %d" % skipped) if skipped else ""


def suite_imag_ratio_gap(rng, samples):
    """|prod (Im z/Im w)^s - 1| grows at most linearly in rho."""
    z, w, _ = _gap_samples(rng, samples)
    worst = 0.0
    skipped = 0
    for i in range(samples):
        s = _S_GRID[i % len(_S_GRID)]
        try:
            gap = imag_ratio_gap(_tp(z[i]), _tp(w[i]), s)
        except (EvalError, ValueError):
            skipped += 1
            continue
        worst = max(worst, gap)
    return worst, samples - skipped, ("skipped %d" % skipped) if skipped else ""


def suite_weighted_lipschitz(rng, samples):
    """Weighted values are sup-and-rho Lipschitz on a compact polydisc."""
    n = 2
    gamma = as_weight(_GAMMA2)
    pairs_per = 8
    centers = sample_coords(rng, max(10, samples // 80), n)
    worst = 0.0
    used = 0
    skipped = 0
    for row in centers:
        c = _tp(row)
        region = Region.polydisc(c, (DELTA, DELTA))
        f = make_f_a(c, gamma)
        S = sup_estimate(f, gamma, region, budget=_SUITE_BUDGET, seed=0, inject=(c,)).value
        Z = sample_in_ball(rng, np.tile(row, (pairs_per, 1)), 0.2)
        W = sample_in_ball(rng, Z, 0.2)
        for i in range(pairs_per):
            try:
                ratio = weighted_lipschitz_ratio(f, gamma, region, _tp(Z[i]), _tp(W[i]), sup=S)
            except (EvalError, ValueError):
                skipped += 1
                continue
            used += 1
            worst = max(worst, ratio)
    return worst, used, ("skipped %d" % skipped) if skipped else ""


def suite_split_bound(rng, samples):
    """lhs <= C * rhs for the two-region split of a weighted difference."""
    n = 2
    gamma = as_weight(_GAMMA2)
    count = max(20, samples // 100)
    worst = 0.0
    for _ in range(count):
        base = sample_coords(rng, 1, n)[0]
        phi_z = _tp(sample_in_ball(rng, base[None, :], 0.25)[0])
        psi_z = _tp(sample_in_ball(rng, np.array(phi_z.coords)[None, :], DELTA)[0])
        a = _tp(sample_in_ball(rng, np.array(phi_z.coords)[None, :], DELTA)[0])
        z = _tp(sample_coords(rng, 1, n)[0])
        f = make_f_a(a, gamma)
        omega1 = Region.polydisc(phi_z, (DELTA, DELTA))
        omega2 = Region.polydisc(psi_z, (DELTA, DELTA))
        h1 = float(rng.uniform(0.0, 1.0))
        s1 = sup_estimate(f, gamma, omega1, budget=_SUITE_BUDGET, seed=0, inject=(phi_z,)).value
        s2 = sup_estimate(f, gamma, omega2, budget=_SUITE_BUDGET, seed=0, inject=(psi_z,)).value
        lhs, rhs = split_bound_gap(
            f, gamma, phi_z, psi_z, z, h1, omega1, omega2, sups=(s1, s2)
        )
        if rhs > 0.0:
            worst = max(worst, lhs / rhs)
        elif lhs > 0.0:
            worst = math.inf
    return worst, count, ""


# (name, callable, fixed cap or None for calibrated)
_SUITES = (
    ("ineq-im-ratio", suite_ineq_im_ratio, 1.0),
    ("ineq-conj-dist", suite_ineq_conj_dist, 1.0),
    ("ineq-point-ratio", suite_ineq_point_ratio, 1.0),
    ("polydisc-equivalence", suite_polydisc_equivalence, 0.0),
    ("bump-peak", suite_bump_peak, 1e-10),
    ("bump-sup", suite_bump_sup, 1.0 + 1e-9),
    ("bump-closed-form", suite_bump_closed_form, 1e-10),  # exact identity, rounding only
    ("swing-cap", suite_swing_cap, 1.0 + 1e-9),
    ("power-ratio-gap", suite_power_ratio_gap, None),
    ("imag-ratio-gap", suite_imag_ratio_gap, None),
    ("weighted-lipschitz", suite_weighted_lipschitz, None),
    ("split-bound", suite_split_bound, None),
)

CALIBRATED_SUITES = tuple(name for name, _, cap in _SUITES if cap is None)

# the strict two-sided ratio bounds must hold with strict inequality
_STRICT_SUITES = ("ineq-im-ratio", "ineq-conj-dist", "ineq-point-ratio")


def load_calibration():
    """Raw worst statistics of the reference run, keyed by suite name."""
    with resources.files("tubecomp").joinpath("data/calibration.json").open("r") as fh:
        data = json.load(fh)
    return {k: float(v) for k, v in data.items() if not k.startswith("_")}


def run_suite(name, seed=0, samples=2000, cap=None):
    """Run one suite by name; cap defaults to its fixed or calibrated value."""
    for idx, (suite_name, fn, fixed_cap) in enumerate(_SUITES):
        if suite_name != name:
            continue
        rng = np.random.default_rng([seed, idx])
        worst, used, note = fn(rng, samples)
        if cap is None:
            cap = fixed_cap if fixed_cap is not None else CALIBRATION_MARGIN * load_calibration()[name]
        ok = worst < cap if name in _STRICT_SUITES else worst <= cap
        return SuiteResult(name, used, worst, cap, ok, note)
    raise ValueError("unknown suite %r" % (name,))


def run_all(seed=0, samples=2000):
    """Run every suite; calibrated caps come from the packaged reference run."""
    if samples < 100:
        raise ValueError("suites need at least 100 samples, got %r" % (samples,))
    return [run_suite(name, seed=seed, samples=samples) for name, _, _ in _SUITES]


def calibrate(samples=100000, seed=7):
    """Reference run for the calibrated suites; returns raw worst statistics."""
    caps = {}
    for idx, (name, fn, fixed_cap) in enumerate(_SUITES):
        if fixed_cap is not None:
            continue
        rng = np.random.default_rng([seed, idx])
        worst, _, _ = fn(rng, samples)
        caps[name] = max(worst, 1e-15)
    return caps
