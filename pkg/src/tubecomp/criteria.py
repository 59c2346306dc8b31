"""Numerical criteria for differences of composition operators.

For self-maps phi, psi of H^n and a weight gamma, the decisive quantity is

    B(z) = rho(z) * (P_phi(z) + P_psi(z)),
    P_phi(z) = prod_k (Im z_k / Im phi_k(z))^{gamma_k},
    rho(z)   = rho(phi(z), psi(z)),

whose finiteness over H^n characterizes boundedness of C_phi - C_psi on the
weighted-sup space, while the boundary limits of rho(z) P_phi(z) and
rho(z) P_psi(z) characterize compactness.  Suprema over the unbounded H^n
cannot be certified numerically, so every verdict is evidence with explicit
thresholds, never a proof.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .expressions import Sub
from .growth import (
    AnalyticFn,
    as_weight,
    log_weighted_modulus_vec,
    make_f_a,
    make_g_am,
    safe_exp,
    sup_estimate,
)
from .halfplane import Region, TubePoint, as_tube_point, sample_coords
from .search import SearchBudget, maximize
from .selfmaps import eval_map, pullback

BOUNDED = "BOUNDED_EVIDENCE"
UNBOUNDED = "UNBOUNDED_EVIDENCE"
COMPACT = "COMPACT_EVIDENCE"
NONCOMPACT = "NONCOMPACT_EVIDENCE"
INCONCLUSIVE = "INCONCLUSIVE"

# Image coordinates beyond these thresholds count as escaping every compact
# subset of H^n (used to attribute a probe trace to a boundary limit).
BOUNDARY_IM_LOW = 1e-6
BOUNDARY_HIGH = 1e6

_TAIL_STEPS = 8

PROBE_BUDGET = SearchBudget(32, 60)


@dataclass(frozen=True)
class Schedule:
    """A geometric path to the boundary: one coordinate moves, others sit at i."""

    coord: int
    direction: str  # 'im->0' | 'im->inf' | 're->+inf' | 're->-inf'
    ratio: float = 10.0
    steps: int = 48

    def __post_init__(self):
        if self.coord < 0:
            raise ValueError("schedule coordinate must be >= 0, got %r" % (self.coord,))
        if self.direction not in ("im->0", "im->inf", "re->+inf", "re->-inf"):
            raise ValueError("unknown schedule direction %r" % (self.direction,))
        if not self.ratio > 1.0:
            raise ValueError("schedule ratio must exceed 1, got %r" % (self.ratio,))
        if self.steps < 4:
            raise ValueError("schedules need at least 4 steps, got %r" % (self.steps,))

    def label(self):
        return "z%d:%s" % (self.coord + 1, self.direction)

    def points(self, n):
        """The schedule's points in H^n, nearest to the base point first."""
        if self.coord >= n:
            raise ValueError("schedule coordinate %d out of range for n=%d" % (self.coord, n))
        pts = []
        for j in range(self.steps):
            scale = self.ratio ** j
            if self.direction == "im->0":
                c = complex(0.0, 1.0 / scale)
            elif self.direction == "im->inf":
                c = complex(0.0, scale)
            elif self.direction == "re->+inf":
                c = complex(scale, 1.0)
            else:
                c = complex(-scale, 1.0)
            coords = [1j] * n
            coords[self.coord] = c
            pts.append(TubePoint(coords))
        return pts


def default_schedules(n, ratio=10.0, steps=48):
    dirs = ("im->0", "im->inf", "re->+inf", "re->-inf")
    return tuple(Schedule(k, d, ratio, steps) for k in range(n) for d in dirs)


@dataclass
class CriterionConfig:
    seed: int = 0
    starts: int = 64
    refine_steps: int = 200
    boundary_schedules: tuple = None  # None -> default_schedules(n) at run time
    unbounded_threshold: float = 1e6
    compact_epsilon: float = 1e-3

    def __post_init__(self):
        if not self.unbounded_threshold > 1.0:
            raise ValueError("unbounded threshold must exceed 1")
        if not self.compact_epsilon > 0.0:
            raise ValueError("compactness epsilon must be positive")
        if self.starts < 1 or self.refine_steps < 0:
            raise ValueError("invalid search budget (%r, %r)" % (self.starts, self.refine_steps))

    @property
    def budget(self):
        return SearchBudget(self.starts, self.refine_steps)

    def schedules_for(self, n):
        if self.boundary_schedules is not None:
            return self.boundary_schedules
        return default_schedules(n)


@dataclass
class BoundednessReport:
    sup_estimate: float
    witness: TubePoint
    probe_traces: list  # [{'schedule': label, 'values': [...]}]
    verdict: str


@dataclass
class CompactnessReport:
    limsup_phi: float
    limsup_psi: float
    verdict: str
    probe_traces: list  # [{'schedule', 'rho', 'q_phi', 'q_psi', 'phi_boundary', 'psi_boundary'}]


def _log_ratio_products(P, images_phi, images_psi, gamma):
    """log P_phi and log P_psi, rowwise with a fixed reduction order."""
    lp = 0.0
    lq = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for k, gk in enumerate(gamma):
            ly = np.log(P[:, k].imag)
            lp = lp + gk * (ly - np.log(images_phi[:, k].imag))
            lq = lq + gk * (ly - np.log(images_psi[:, k].imag))
    return lp, lq


def _rho_rows(images_phi, images_psi):
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.abs(images_phi - images_psi) / np.abs(images_phi - np.conj(images_psi))
    return np.max(d, axis=1)


def log_boundedness_functional_vec(phi, psi, gamma, P):
    """Rowwise log B over an (m, n) coordinate array; NaN marks bad rows."""
    P = np.asarray(P, dtype=complex)
    images_phi, valid_phi = phi.eval_vec(P)
    images_psi, valid_psi = psi.eval_vec(P)
    valid = valid_phi & valid_psi
    r = _rho_rows(images_phi, images_psi)
    lp, lq = _log_ratio_products(P, images_phi, images_psi, gamma)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(r) + np.logaddexp(lp, lq)
    return np.where(valid, out, np.nan)


def boundedness_functional(phi, psi, gamma, z):
    """B(z) = rho(z) * (P_phi(z) + P_psi(z)); exactly 0 when the images agree."""
    gamma = as_weight(gamma, phi.n)
    z = as_tube_point(z, phi.n)
    phi_z = eval_map(phi, z)
    psi_z = eval_map(psi, z)
    if phi_z == psi_z:
        return 0.0
    P = np.array([z.coords], dtype=complex)
    val = float(log_boundedness_functional_vec(phi, psi, gamma, P)[0])
    return safe_exp(val)


def _trace_values(value_fn, points):
    """Evaluate along schedule points, truncating at the first undefined step."""
    vals = []
    for z in points:
        v = value_fn(z)
        if math.isnan(v):
            break
        vals.append(v)
    return vals


def _strictly_increasing_tail(vals, k=3):
    if len(vals) < k:
        return False
    tail = vals[-k:]
    return all(tail[j] < tail[j + 1] for j in range(k - 1))


def estimate_sup_boundedness(phi, psi, gamma, cfg=None):
    """Supremum search for B plus boundary probes, reduced to a verdict.

    Trace maxima are injected into the supremum search, so the reported
    sup_estimate always dominates every probe value; the verdict logic can
    therefore read divergence off the trace shape alone.
    """
    cfg = cfg or CriterionConfig()
    gamma = as_weight(gamma, phi.n)
    n = phi.n

    def logB_rows(P):
        return log_boundedness_functional_vec(phi, psi, gamma, P)

    def b_at(z):
        v = float(logB_rows(np.array([z.coords], dtype=complex))[0])
        return math.nan if math.isnan(v) else safe_exp(v)

    traces = []
    inject = [TubePoint((1j,) * n)]
    for sched in cfg.schedules_for(n):
        pts = sched.points(n)
        vals = _trace_values(b_at, pts)
        traces.append({"schedule": sched.label(), "values": vals})
        finite = [(v, j) for j, v in enumerate(vals) if math.isfinite(v)]
        if finite:
            best = max(finite)
            inject.append(pts[best[1]])

    res = maximize(logB_rows, Region.whole(n), budget=cfg.budget, seed=cfg.seed, inject=inject)
    sup = safe_exp(res.log_value)
    witness = TubePoint(res.coords)

    T = cfg.unbounded_threshold
    verdict = INCONCLUSIVE
    unbounded = False
    for tr in traces:
        vals = tr["values"]
        finite = [v for v in vals if math.isfinite(v)]
        overflowed = len(finite) < len(vals)  # an inf value means B left double range
        if overflowed and _strictly_increasing_tail(finite, min(3, max(2, len(finite)))):
            unbounded = True
        elif vals and vals[-1] > T and _strictly_increasing_tail(vals):
            unbounded = True
    if unbounded:
        verdict = UNBOUNDED
    else:
        tol = 1e-9 * max(1.0, sup) + 1e-9
        bounded = len(traces) > 0
        for tr in traces:
            vals = tr["values"]
            if not vals:
                bounded = False
                break
            if vals[-1] > sup + tol:
                bounded = False
                break
            if _strictly_increasing_tail(vals) and vals[-1] >= sup - tol:
                bounded = False  # still climbing at the very edge of the estimate
                break
        if bounded:
            verdict = BOUNDED

    return BoundednessReport(sup, witness, traces, verdict)


def _boundary_flags(images):
    """Whether an image point counts as outside every compact subset."""
    im = images.imag
    re = images.real
    return (im.min(axis=1) < BOUNDARY_IM_LOW) | (im.max(axis=1) > BOUNDARY_HIGH) | (
        np.abs(re).max(axis=1) > BOUNDARY_HIGH
    )


def compactness_limits(phi, psi, gamma, cfg=None):
    """Estimate the boundary limsups of rho(z) P_phi(z) and rho(z) P_psi(z).

    Each schedule drives z toward the boundary; a trace contributes to the
    phi-limsup only at steps where phi(z) itself has escaped the compact
    part of H^n (and symmetrically for psi).  A map whose image never
    escapes contributes a vacuous limit of 0.
    """
    cfg = cfg or CriterionConfig()
    gamma = as_weight(gamma, phi.n)
    n = phi.n

    limsup_phi = 0.0
    limsup_psi = 0.0
    traces = []
    for sched in cfg.schedules_for(n):
        pts = sched.points(n)
        P = np.array([z.coords for z in pts], dtype=complex)
        images_phi, valid_phi = phi.eval_vec(P)
        images_psi, valid_psi = psi.eval_vec(P)
        valid = valid_phi & valid_psi
        nvalid = int(np.argmin(valid)) if not valid.all() else len(pts)
        if nvalid == 0:
            traces.append(
                {"schedule": sched.label(), "rho": [], "q_phi": [], "q_psi": [],
                 "phi_boundary": False, "psi_boundary": False}
            )
            continue
        Pv = P[:nvalid]
        iphi = images_phi[:nvalid]
        ipsi = images_psi[:nvalid]
        r = _rho_rows(iphi, ipsi)
        lp, lq = _log_ratio_products(Pv, iphi, ipsi, gamma)
        q_phi = np.where(r == 0.0, 0.0, r * np.exp(lp))
        q_psi = np.where(r == 0.0, 0.0, r * np.exp(lq))
        phi_b = _boundary_flags(iphi)
        psi_b = _boundary_flags(ipsi)

        tail = slice(max(0, nvalid - _TAIL_STEPS), nvalid)
        phi_attr = bool(phi_b[nvalid - 1])
        psi_attr = bool(psi_b[nvalid - 1])
        if phi_attr:
            sel = q_phi[tail][phi_b[tail]]
            if sel.size:
                limsup_phi = max(limsup_phi, float(np.max(sel)))
        if psi_attr:
            sel = q_psi[tail][psi_b[tail]]
            if sel.size:
                limsup_psi = max(limsup_psi, float(np.max(sel)))
        traces.append(
            {
                "schedule": sched.label(),
                "rho": [float(x) for x in r],
                "q_phi": [float(x) for x in q_phi],
                "q_psi": [float(x) for x in q_psi],
                "phi_boundary": phi_attr,
                "psi_boundary": psi_attr,
            }
        )

    eps = cfg.compact_epsilon
    if limsup_phi < eps and limsup_psi < eps:
        verdict = COMPACT
    elif limsup_phi >= 10.0 * eps or limsup_psi >= 10.0 * eps:
        verdict = NONCOMPACT
    else:
        verdict = INCONCLUSIVE
    return CompactnessReport(limsup_phi, limsup_psi, verdict, traces)


def _weighted_power_product(bases, gamma):
    out = 1.0
    for b, gk in zip(bases, gamma):
        out *= b ** gk
    return out


def lower_bound_at(phi, psi, gamma, z):
    """A certified lower bound on the operator norm of C_phi - C_psi.

    Maximum of the two bump-difference bounds and the swing-function bound
    (divided by n, each summed swing norm being at most 1), clamped at 0.
    The inner products are factored so that phi = psi gives exactly 0.
    """
    gamma = as_weight(gamma, phi.n)
    z = as_tube_point(z, phi.n)
    phi_z = eval_map(phi, z)
    psi_z = eval_map(psi, z)
    n = phi.n

    def ratio_product(a_img):
        return safe_exp(
            math.fsum(gk * (math.log(zk.imag) - math.log(ak.imag)) for gk, zk, ak in zip(gamma, z, a_img))
        )

    def cross_product(a_img, b_img):
        # prod_k (2 Im a_k / |b_k - conj a_k|)^{2 gamma_k}; equals 1 exactly when b = a
        bases = [
            (2.0 * ak.imag / abs(bk - ak.conjugate())) ** 2 for ak, bk in zip(a_img, b_img)
        ]
        return _weighted_power_product(bases, gamma)

    p_phi = ratio_product(phi_z)
    p_psi = ratio_product(psi_z)
    g_phi = cross_product(phi_z, psi_z)
    g_psi = cross_product(psi_z, phi_z)

    f1 = p_phi * (1.0 - g_phi)
    f2 = p_psi * (1.0 - g_psi)
    r = max(
        (abs(pk - sk) / abs(sk - pk.conjugate()) for pk, sk in zip(phi_z, psi_z)),
        default=0.0,
    )
    g = 0.0 if r == 0.0 else r * p_phi * g_phi / n
    return max(0.0, f1, f2, g)


def _difference_fn(phi, psi, f):
    return AnalyticFn(Sub(pullback(phi, f).expr, pullback(psi, f).expr), f.n)


def _norm_of_difference(phi, psi, gamma, f, inject, budget, seed):
    diff = _difference_fn(phi, psi, f)
    return sup_estimate(diff, gamma, Region.whole(f.n), budget=budget, seed=seed, inject=inject).value


def operator_norm_probe(
    phi, psi, gamma, family_size, seed=0, budget=PROBE_BUDGET, anchors=(), centers=()
):
    """Empirical lower-bound proxy for ||C_phi - C_psi||.

    Max over a family of test functions of ||(C_phi - C_psi) f|| divided by
    an estimate of ||f||.  The family holds, in order: the bump and swing
    functions generated by the images of each anchor point (so pointwise
    lower bounds at those anchors are dominated by construction), bumps
    centered at each explicit center, then family_size seeded random
    members alternating bump/swing.  Monotone in family_size for a fixed
    seed: growing the family only extends the sequence.
    """
    if family_size < 1:
        raise ValueError("family size must be >= 1")
    gamma = as_weight(gamma, phi.n)
    n = phi.n
    members = []  # (test fn, points to inject into the difference search)
    for z in anchors:
        z = as_tube_point(z, n)
        phi_z = eval_map(phi, z)
        psi_z = eval_map(psi, z)
        members.append((make_f_a(phi_z, gamma), (z, phi_z)))
        members.append((make_f_a(psi_z, gamma), (z, psi_z)))
        for m in range(1, n + 1):
            members.append((make_g_am(phi_z, m, gamma), (z, phi_z)))
    for a in centers:
        a = as_tube_point(a, n)
        members.append((make_f_a(a, gamma), (a,)))
    rng = np.random.default_rng(seed)
    for j in range(family_size):
        a = TubePoint(tuple(sample_coords(rng, 1, n)[0]))
        if j % 2 == 0:
            members.append((make_f_a(a, gamma), (a,)))
        else:
            members.append((make_g_am(a, 1 + (j % n), gamma), (a,)))

    best = 0.0
    for f, inject in members:
        num = _norm_of_difference(phi, psi, gamma, f, inject, budget, seed)
        if num == 0.0:
            continue
        den = sup_estimate(f, gamma, Region.whole(n), budget=budget, seed=seed, inject=inject[-1:]).value
        ratio = num / den if den > 0.0 else 0.0
        best = max(best, ratio)
    return best


def compactness_probe_sequence(phi, psi, gamma, schedule, budget=PROBE_BUDGET, seed=0):
    """||(C_phi - C_psi) f_{a_j}|| estimates along a boundary schedule a_j."""
    gamma = as_weight(gamma, phi.n)
    out = []
    for a in schedule.points(phi.n):
        f = make_f_a(a, gamma)
        out.append(_norm_of_difference(phi, psi, gamma, f, (a,), budget, seed))
    return out


def psumming_family(n, gamma, size, seed):
    """Seeded bump family with clustered centers.

    Centers are drawn from a fixed cluster box (Re in [-1, 1], Im in
    [0.5, 2]) rather than the whole sampling box: a single point functional
    can never control bumps with pairwise-disjoint supports, so spread
    centers would scale the summing ratio with the family size instead of
    testing the operator.
    """
    gamma = as_weight(gamma, n)
    rng = np.random.default_rng(seed)
    centers = []
    for _ in range(size):
        re = rng.uniform(-1.0, 1.0, n)
        im = rng.uniform(0.5, 2.0, n)
        centers.append(TubePoint(tuple(re + 1j * im)))
    return [make_f_a(a, gamma) for a in centers], centers


def psumming_ratio(
    phi, psi, gamma, functions, xi_samples=256, p=1.0, seed=0, budget=PROBE_BUDGET, witnesses=None
):
    """Strong-p-sum of the difference norms over the best weak-p point sum.

    numerator   (sum_j ||(C_phi - C_psi) f_j||^p)^{1/p}
    denominator sup_xi (sum_j |f_j(xi)|^p prod (Im xi_k)^{p gamma_k})^{1/p}

    xi runs over seeded box samples plus each function's witness (when
    given).  A zero numerator returns 0 regardless of the denominator.
    """
    if not functions:
        raise ValueError("need at least one test function")
    if p < 1.0:
        raise ValueError("p must be >= 1, got %r" % (p,))
    gamma = as_weight(gamma, phi.n)
    n = phi.n
    witnesses = list(witnesses) if witnesses is not None else [None] * len(functions)
    if len(witnesses) != len(functions):
        raise ValueError("witnesses must match functions one to one")

    norms = []
    for f, w in zip(functions, witnesses):
        inject = (w,) if w is not None else ()
        norms.append(_norm_of_difference(phi, psi, gamma, f, inject, budget, seed))
    num = sum(v ** p for v in norms) ** (1.0 / p)
    if num == 0.0:
        return 0.0

    rng = np.random.default_rng(seed)
    Xi = sample_coords(rng, xi_samples, n)
    extra = [np.array(w.coords, dtype=complex) for w in witnesses if w is not None]
    if extra:
        Xi = np.vstack([Xi, np.array(extra)])
    weak = np.zeros(Xi.shape[0])
    for f in functions:
        wm = np.exp(log_weighted_modulus_vec(f, gamma, Xi))
        weak += np.where(np.isnan(wm), 0.0, wm) ** p
    den = float(np.max(weak)) ** (1.0 / p)
    if den == 0.0:
        return math.inf
    return num / den
