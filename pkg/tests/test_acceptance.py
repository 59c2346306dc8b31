"""Acceptance gate: one test per criterion, one PASS/FAIL line each.

Every criterion prints a single summary line; a FAIL line always comes with
a failing assert so the suite cannot go green while a criterion is red.
"""

import math
import time

import numpy as np

from tubecomp.criteria import (
    estimate_sup_boundedness,
    compactness_limits,
    psumming_family,
    psumming_ratio,
)
from tubecomp.growth import (
    as_weight,
    log_weighted_modulus_vec,
    make_f_a,
    make_g_am,
    weighted_modulus,
)
from tubecomp.halfplane import (
    TubePoint,
    as_tube_point,
    boundary_torus_samples,
    circle_point_vec,
    pseudo_dist,
    pseudo_dist_vec,
    sample_coords,
)
from tubecomp.report import run_scenario
from tubecomp.scenarios import BUILTIN_SCENARIOS
from tubecomp.selfmaps import (
    Affine,
    Moebius,
    classify_component,
    parse_component,
    parse_selfmap,
    to_text,
    validate,
)
from tubecomp.suites import run_suite

DELTA = 0.5
N_SAMPLES = 100_000


def _line(num, ok, detail):
    print("[criterion %d] %s %s" % (num, "PASS" if ok else "FAIL", detail))
    assert ok, "criterion %d: %s" % (num, detail)


def _pairs_in_ball(rng, count):
    z = sample_coords(rng, count, 1).ravel()
    t = DELTA * (1.0 - 1e-9) * rng.uniform(0.0, 1.0, count)
    theta = rng.uniform(0.0, 2.0 * math.pi, count)
    return z, circle_point_vec(z, t, theta)


def test_criterion_1_metric_inequalities():
    """Three two-sided ratio bounds inside the delta-ball, 1e5 pairs each."""
    lo = (1.0 - DELTA) / (1.0 + DELTA)
    hi = (1.0 + DELTA) / (1.0 - DELTA)
    rng = np.random.default_rng(101)
    t0 = time.monotonic()
    violations = 0

    z, w = _pairs_in_ball(rng, N_SAMPLES)
    r = z.imag / w.imag
    violations += int(np.count_nonzero(~((lo < r) & (r < hi))))

    z, w = _pairs_in_ball(rng, N_SAMPLES)
    r = np.abs(z - np.conj(w)) / (2.0 * z.imag)
    violations += int(np.count_nonzero(~((lo < r) & (r < hi))))

    z, w = _pairs_in_ball(rng, N_SAMPLES)
    a = sample_coords(rng, N_SAMPLES, 1).ravel()
    r = np.abs((z - np.conj(a)) / (w - np.conj(a)))
    violations += int(np.count_nonzero(~((lo < r) & (r < hi))))

    elapsed = time.monotonic() - t0
    ok = violations == 0 and elapsed < 5.0
    _line(1, ok, "0 violations expected, got %d over 3x%d pairs in %.2fs" % (
        violations, N_SAMPLES, elapsed))


def test_criterion_2_polydisc_equivalence():
    """Euclidean-disc membership matches pseudo-hyperbolic membership."""
    rng = np.random.default_rng(202)
    t0 = time.monotonic()
    n = 2
    z = sample_coords(rng, N_SAMPLES, n)
    delta = rng.uniform(0.1, 0.9, (N_SAMPLES, n))
    # half the radii push past delta so both sides of the boundary occur
    t = delta * rng.uniform(0.0, 1.25, (N_SAMPLES, n))
    t = np.minimum(t, 0.97)
    theta = rng.uniform(0.0, 2.0 * math.pi, (N_SAMPLES, n))
    w = circle_point_vec(z, t, theta)

    d = pseudo_dist_vec(z, w)
    off_band = np.all(np.abs(d - delta) > 1e-9, axis=1)
    pseudo_in = np.all(d < delta, axis=1)

    s = (1.0 + delta * delta) / (1.0 - delta * delta)
    radius = 2.0 * delta / (1.0 - delta * delta) * z.imag
    center = z.real + 1j * s * z.imag
    euclid_in = np.all(np.abs(w - center) < radius, axis=1)

    mismatches = int(np.count_nonzero(pseudo_in[off_band] != euclid_in[off_band]))

    worst_torus = 0.0
    for k in range(8):
        zt = TubePoint(tuple(sample_coords(rng, 1, n).ravel()))
        dt = tuple(rng.uniform(0.1, 0.9, n))
        for pt in boundary_torus_samples(zt, dt, 5):
            for zk, wk, dk in zip(zt.coords, pt.coords, dt):
                worst_torus = max(worst_torus, abs(pseudo_dist(zk, wk) - dk))

    elapsed = time.monotonic() - t0
    ok = mismatches == 0 and worst_torus <= 1e-12 and elapsed < 5.0
    _line(2, ok, "%d membership mismatches (of %d off-band triples), torus error %.2e, %.2fs" % (
        mismatches, int(np.count_nonzero(off_band)), worst_torus, elapsed))


def _random_instances(rng, count):
    for trial in range(count):
        n = trial % 3 + 1
        re = rng.uniform(-10.0, 10.0, n)
        im = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), n))
        a = TubePoint(tuple(re + 1j * im))
        gamma = tuple(rng.uniform(0.25, 4.0, n))
        yield trial, n, a, gamma


def _sampled_sup(rng, f, gamma, a, n, count=10_000):
    half = count // 2
    far = sample_coords(rng, half, n)
    base = np.tile(np.asarray(a.coords), (count - half, 1))
    t = rng.uniform(0.0, 0.999, (count - half, n))
    theta = rng.uniform(0.0, 2.0 * math.pi, (count - half, n))
    near = circle_point_vec(base, t, theta)
    P = np.vstack([far, near])
    lg = log_weighted_modulus_vec(f, as_weight(gamma), P)
    return float(np.exp(np.max(lg)))


def test_criterion_3_bump_peak_and_cap():
    rng = np.random.default_rng(303)
    worst_peak = 0.0
    worst_sup = 0.0
    for _, n, a, gamma in _random_instances(rng, 100):
        f = make_f_a(a, gamma)
        worst_peak = max(worst_peak, abs(weighted_modulus(f, gamma, a) - 1.0))
        worst_sup = max(worst_sup, _sampled_sup(rng, f, gamma, a, n))
    ok = worst_peak <= 1e-10 and worst_sup <= 1.0 + 1e-9
    _line(3, ok, "peak error %.2e (cap 1e-10), sampled sup %.12f (cap 1+1e-9)" % (
        worst_peak, worst_sup))


def test_criterion_4_swing_function_cap():
    rng = np.random.default_rng(404)
    worst_sup = 0.0
    for trial, n, a, gamma in _random_instances(rng, 100):
        g = make_g_am(a, 1 + trial % n, gamma)
        worst_sup = max(worst_sup, _sampled_sup(rng, g, gamma, a, n))
    ok = worst_sup <= 1.0 + 1e-9
    _line(4, ok, "sampled sup %.12f (cap 1+1e-9) over 100 instances" % (worst_sup,))


def test_criterion_5_lemma_ratio_suites():
    results = [
        run_suite(name, seed=29, samples=10_000)
        for name in ("power-ratio-gap", "imag-ratio-gap", "weighted-lipschitz", "split-bound")
    ]
    all_ok = all(r.ok and math.isfinite(r.worst) for r in results)
    detail = ", ".join("%s %.4g<=%.4g" % (r.name, r.worst, r.cap) for r in results)
    _line(5, all_ok, detail)


_EXPECTED_VERDICTS = {
    "identity-pair": ("BOUNDED_EVIDENCE", "COMPACT_EVIDENCE"),
    "translation-1d": ("BOUNDED_EVIDENCE", "NONCOMPACT_EVIDENCE"),
    "dilation-1d": ("BOUNDED_EVIDENCE", "NONCOMPACT_EVIDENCE"),
    "inversion-shift-1d": ("UNBOUNDED_EVIDENCE", "NONCOMPACT_EVIDENCE"),
    "translation-2d": ("BOUNDED_EVIDENCE", "NONCOMPACT_EVIDENCE"),
}


def test_criterion_6_scenario_verdicts():
    problems = []
    slowest = 0.0
    for name, expected in _EXPECTED_VERDICTS.items():
        sc = BUILTIN_SCENARIOS[name]
        phi, psi = sc.maps()
        seen = set()
        bound = comp = None
        for seed in range(5):
            cfg = sc.config({"seed": seed})
            t0 = time.monotonic()
            bound = estimate_sup_boundedness(phi, psi, sc.gamma, cfg)
            comp = compactness_limits(phi, psi, sc.gamma, cfg)
            slowest = max(slowest, time.monotonic() - t0)
            seen.add((bound.verdict, comp.verdict))
        if seen != {expected}:
            problems.append("%s gave %s, wanted %s" % (name, sorted(seen), expected))
            continue
        if name == "translation-1d":
            if not 0.95 <= bound.sup_estimate <= 1.0 + 1e-6:
                problems.append("translation sup %.6f outside [0.95, 1+1e-6]" % bound.sup_estimate)
            if not comp.limsup_phi >= 0.9:
                problems.append("translation phi-limsup %.6f < 0.9" % comp.limsup_phi)
        if name == "dilation-1d" and not bound.sup_estimate <= 1.55:
            problems.append("dilation sup %.6f > 1.55" % bound.sup_estimate)
        if name == "inversion-shift-1d":
            worst = max(
                v for tr in bound.probe_traces for v in tr["values"] if math.isfinite(v)
            )
            if not worst > 1e6:
                problems.append("inversion trace max %.3g <= 1e6" % worst)
    if slowest >= 10.0:
        problems.append("slowest scenario run %.2fs >= 10s" % slowest)
    _line(6, not problems,
          "; ".join(problems) if problems else
          "5 scenarios x 5 seeds all stable, slowest run %.2fs" % slowest)


def test_criterion_7_lower_bound_consistency():
    problems = []
    for name in _EXPECTED_VERDICTS:
        rep = run_scenario(BUILTIN_SCENARIOS[name])
        probe = rep["operator_norm_probe"]["value"]
        for row in rep["lower_bounds"]:
            if not row["value"] <= probe + 1e-6:
                problems.append("%s: lower bound %.6g beats probe %.6g" % (
                    name, row["value"], probe))
        if name == "identity-pair":
            if probe != 0.0 or any(row["value"] != 0.0 for row in rep["lower_bounds"]):
                problems.append("identity-pair probes are not exactly 0")
    _line(7, not problems,
          "; ".join(problems) if problems else
          "all lower bounds within probe + 1e-6 across 5 scenarios")


def test_criterion_8_psumming_ratios():
    gamma = (1.0,)
    phi = parse_selfmap("z1", 1)
    psi = parse_selfmap("z1 + i", 1)
    sup = estimate_sup_boundedness(phi, psi, gamma).sup_estimate
    cap = 2.0 * sup + 1e-6
    worst = 0.0
    for size in range(1, 33):
        fns, centers = psumming_family(1, gamma, size, seed=0)
        ratio = psumming_ratio(phi, psi, gamma, fns, p=1.0, witnesses=centers)
        worst = max(worst, ratio)
        if not (math.isfinite(ratio) and 0.0 <= ratio <= cap):
            _line(8, False, "size %d ratio %.6f outside [0, %.6f]" % (size, ratio, cap))
    ident_bad = []
    for size in (1, 2, 4, 8, 16, 32):
        fns, centers = psumming_family(1, gamma, size, seed=0)
        r = psumming_ratio(phi, phi, gamma, fns, p=1.0, witnesses=centers)
        if r != 0.0:
            ident_bad.append(size)
    ok = not ident_bad
    _line(8, ok,
          "identity ratios nonzero at sizes %s" % ident_bad if ident_bad else
          "sizes 1..32 worst ratio %.4f <= %.4f; identity all 0" % (worst, cap))


def test_criterion_9_parser_round_trip(fixtures_dir):
    lines = [
        ln for ln in (fixtures_dir / "expr_corpus.txt").read_text().splitlines() if ln
    ]
    bad = []
    for line in lines:
        node = parse_component(line, 3)
        if parse_component(to_text(node), 3) != node:
            bad.append(line)
    cls_ok = (
        classify_component(parse_component("z1 + i", 1)) == Affine(lam=1.0, c=1j)
        and classify_component(parse_component("-1/z1", 1)) == Moebius(0.0, -1.0, 1.0, 0.0)
        and classify_component(parse_component("(2*z1 + 1)/(z1 + 3)", 1))
        == Moebius(2.0, 1.0, 1.0, 3.0)
    )
    rejected = validate(parse_selfmap("z1 - 2*i", 1))
    rej_ok = rejected.verdict == "rejected" and rejected.counterexample is not None
    ok = len(lines) == 50 and not bad and cls_ok and rej_ok
    _line(9, ok, "50-expression corpus round-trips, classifications and rejection hold"
          if ok else "round-trip failures: %r, classify ok=%s, reject ok=%s" % (bad, cls_ok, rej_ok))
