"""Growth-space machinery on H^n.

The weighted sup norm ||f|| = sup_z |f(z)| * prod_k (Im z_k)^{gamma_k}, its
regional suprema, the extremal test functions

    f_a(z) = prod_k ((2i)^2 Im a_k)^{gamma_k} / (z_k - conj(a_k))^{2 gamma_k}
    g_{a,m}(z) = 4^{|gamma|} (z_m - a_m)/(z_m - conj(a_m))
                 * prod_k (Im a_k)^{gamma_k} / (z_k - conj(a_k))^{2 gamma_k}

and the normalized gap quantities used by the property suites (power-ratio,
imaginary-ratio, weighted Lipschitz, and the two-region split bound).

All modulus computations run in log space; only complex values of sums are
ever formed directly.
"""

import math
from collections import namedtuple
from functools import reduce

import numpy as np

from .expressions import (
    Const,
    Coord,
    Div,
    EvalError,
    Expr,
    Mul,
    Pow,
    Sub,
    compile_expr,
    eval_value,
    free_coords,
    principal_power,
)
from .halfplane import TubePoint, as_tube_point, rho
from .search import DEFAULT_BUDGET, maximize

__all__ = [
    "Weight",
    "as_weight",
    "AnalyticFn",
    "make_f_a",
    "make_g_am",
    "principal_power",
    "weighted_modulus",
    "log_weighted_modulus",
    "weighted_value",
    "SupEstimate",
    "sup_estimate",
    "power_ratio_gap",
    "imag_ratio_gap",
    "weighted_lipschitz_ratio",
    "split_bound_gap",
    "safe_exp",
]


def safe_exp(x):
    """math.exp that saturates to inf instead of raising on overflow."""
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


class Weight:
    """The multi-index gamma: strictly positive exponents, one per coordinate."""

    __slots__ = ("exponents", "total")

    def __init__(self, exponents):
        if isinstance(exponents, (int, float)):
            exponents = (exponents,)
        exponents = tuple(float(g) for g in exponents)
        if not exponents:
            raise ValueError("a weight needs at least one exponent")
        if any(not (g > 0.0 and math.isfinite(g)) for g in exponents):
            raise ValueError("weight exponents must be strictly positive: %r" % (exponents,))
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "total", math.fsum(exponents))

    @property
    def n(self):
        return len(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __getitem__(self, k):
        return self.exponents[k]

    def __eq__(self, other):
        return isinstance(other, Weight) and self.exponents == other.exponents

    def __hash__(self):
        return hash(self.exponents)

    def __repr__(self):
        return "Weight(%r)" % (self.exponents,)

    def __setattr__(self, name, value):
        raise AttributeError("Weight is immutable")


def as_weight(gamma, n=None):
    if isinstance(gamma, (int, float)) and n is not None:
        gamma = (float(gamma),) * n
    if not isinstance(gamma, Weight):
        gamma = Weight(gamma)
    if n is not None and gamma.n != n:
        raise ValueError("dimension mismatch: expected %d exponents, got %d" % (n, gamma.n))
    return gamma


class AnalyticFn:
    """A closed-form evaluable function H^n -> C backed by an expression tree."""

    __slots__ = ("expr", "n")

    def __init__(self, expr, n):
        if not isinstance(expr, Expr):
            raise TypeError("expected an expression tree, got %r" % (expr,))
        n = int(n)
        if n < 1:
            raise ValueError("dimension must be >= 1")
        bad = [k for k in free_coords(expr) if k >= n]
        if bad:
            raise ValueError("expression reads coordinate z%d but the dimension is %d" % (bad[0] + 1, n))
        object.__setattr__(self, "expr", expr)
        object.__setattr__(self, "n", n)

    @classmethod
    def constant(cls, c, n):
        return cls(Const(complex(c)), n)

    def __call__(self, z):
        """Complex value at a point; raises EvalError on singular evaluation."""
        z = as_tube_point(z, self.n)
        try:
            return eval_value(self.expr, z.coords)
        except OverflowError as exc:
            raise EvalError("overflow evaluating at %r" % (z,)) from exc

    def value_vec(self, P):
        """Complex values over an (m, n) coordinate array; NaN marks failures."""
        P = np.asarray(P, dtype=complex)
        out = np.asarray(compile_expr(self.expr, "value_vec")(P.T), dtype=complex)
        return np.broadcast_to(out, (P.shape[0],)).copy()

    def logabs_vec(self, P):
        """log|f| over an (m, n) coordinate array; NaN marks failures."""
        P = np.asarray(P, dtype=complex)
        out = compile_expr(self.expr, "logabs_vec")(P.T)
        return np.broadcast_to(np.asarray(out, dtype=float), (P.shape[0],)).copy()

    def __setattr__(self, name, value):
        raise AttributeError("AnalyticFn is immutable")

    def __repr__(self):
        return "AnalyticFn(n=%d, expr=%r)" % (self.n, self.expr)


def _product(factors):
    return reduce(Mul, factors)


def make_f_a(a, gamma):
    """The unit-norm test bump centered at a.

    The constant ((2i)^2 Im a_k)^{gamma_k} has a negative real base, so it is
    assembled as (2i)^{2 gamma_k} * (Im a_k)^{gamma_k}: same value on the
    branch consistent with the principal power of (2i)^2 taken before the
    exponent is applied, and every remaining base stays off the cut.
    """
    a = as_tube_point(a)
    gamma = as_weight(gamma, a.n)
    factors = []
    for k, (ak, gk) in enumerate(zip(a, gamma)):
        c4 = principal_power(2j, 2.0 * gk)
        num = Mul(Const(c4), Pow(Const(complex(ak.imag)), gk))
        den = Pow(Sub(Coord(k), Const(ak.conjugate())), 2.0 * gk)
        factors.append(Div(num, den))
    return AnalyticFn(_product(factors), a.n)


def make_g_am(a, m, gamma):
    """The vanishing-at-a companion bump, distinguished coordinate m (1-based)."""
    a = as_tube_point(a)
    gamma = as_weight(gamma, a.n)
    if not 1 <= m <= a.n:
        raise IndexError("coordinate index m=%r out of range 1..%d" % (m, a.n))
    am = a[m - 1]
    swing = Div(Sub(Coord(m - 1), Const(am)), Sub(Coord(m - 1), Const(am.conjugate())))
    factors = [Const(4.0 ** gamma.total), swing]
    for k, (ak, gk) in enumerate(zip(a, gamma)):
        factors.append(
            Div(Pow(Const(complex(ak.imag)), gk), Pow(Sub(Coord(k), Const(ak.conjugate())), 2.0 * gk))
        )
    return AnalyticFn(_product(factors), a.n)


def _log_weight_term(P, gamma):
    """Sum_k gamma_k log Im z_k, elementwise over rows, fixed reduction order."""
    s = 0.0
    for k, gk in enumerate(gamma):
        s = s + gk * np.log(P[:, k].imag)
    return s


def log_weighted_modulus_vec(f, gamma, P):
    """log(|f| * prod Im^gamma) over an (m, n) array; NaN marks failures."""
    gamma = as_weight(gamma, f.n)
    P = np.asarray(P, dtype=complex)
    return f.logabs_vec(P) + _log_weight_term(P, gamma)


def log_weighted_modulus(f, gamma, z):
    """Scalar log weighted modulus; shares the vector code path bit-for-bit."""
    z = as_tube_point(z, f.n)
    P = np.array([z.coords], dtype=complex)
    out = float(log_weighted_modulus_vec(f, gamma, P)[0])
    if math.isnan(out):
        # re-run the scalar evaluator to surface the offending coordinate
        compile_expr(f.expr, "logabs")(z.coords)
        raise EvalError("evaluation failed at %r" % (z,))
    return out


def weighted_modulus(f, gamma, z):
    """|f(z)| * prod_k (Im z_k)^{gamma_k}, computed in log space."""
    return safe_exp(log_weighted_modulus(f, gamma, z))


def weighted_value(f, gamma, z):
    """The complex value f(z) * prod_k (Im z_k)^{gamma_k} (phase preserved)."""
    z = as_tube_point(z, f.n)
    gamma = as_weight(gamma, f.n)
    w = math.fsum(gk * math.log(zk.imag) for gk, zk in zip(gamma, z))
    return f(z) * safe_exp(w)


SupEstimate = namedtuple("SupEstimate", ["value", "witness", "samples_used", "converged"])


def sup_estimate(f, gamma, region, budget=DEFAULT_BUDGET, seed=0, inject=()):
    """Lower-bound estimate of the regional weighted sup norm.

    Multi-start search plus local refinement; deterministic for a fixed
    seed.  Every point in inject is evaluated exactly, so the estimate never
    falls below the weighted modulus at an injected point; injecting the
    witness of a smaller region's estimate therefore makes region
    enlargement monotone.
    """
    gamma = as_weight(gamma, f.n)
    if region.n != f.n:
        raise ValueError("region dimension %d does not match function dimension %d" % (region.n, f.n))

    def objective(P):
        return log_weighted_modulus_vec(f, gamma, P)

    res = maximize(objective, region, budget=budget, seed=seed, inject=inject)
    witness = TubePoint(res.coords)
    return SupEstimate(safe_exp(res.log_value), witness, res.samples_used, res.converged)


def power_ratio_gap(a, z, w, s):
    """|prod_k ((z_k - conj a_k)/(w_k - conj a_k))^{s_k} - 1| / rho(z, w).

    Both base factors lie in the upper half-plane, so their quotient never
    meets the principal branch cut.
    """
    a = as_tube_point(a)
    z = as_tube_point(z, a.n)
    w = as_tube_point(w, a.n)
    s = as_weight(s, a.n)
    r = rho(z, w)
    if r == 0.0:
        raise ValueError("gap ratio undefined at pseudo-hyperbolic distance 0")
    prod = 1.0 + 0.0j
    for ak, zk, wk, sk in zip(a, z, w, s):
        prod *= principal_power((zk - ak.conjugate()) / (wk - ak.conjugate()), sk)
    return abs(prod - 1.0) / r


def imag_ratio_gap(z, w, s):
    """|prod_k (Im z_k / Im w_k)^{s_k} - 1| / rho(z, w)."""
    z = as_tube_point(z)
    w = as_tube_point(w, z.n)
    s = as_weight(s, z.n)
    r = rho(z, w)
    if r == 0.0:
        raise ValueError("gap ratio undefined at pseudo-hyperbolic distance 0")
    logp = math.fsum(sk * (math.log(zk.imag) - math.log(wk.imag)) for sk, zk, wk in zip(s, z, w))
    return abs(safe_exp(logp) - 1.0) / r


def weighted_lipschitz_ratio(f, gamma, region, z, w, sup=None, budget=DEFAULT_BUDGET, seed=0):
    """|f(z) Im^gamma - f(w) Im^gamma| / (S * rho(z, w)) on a region.

    S is the regional weighted sup norm (estimated with z and w injected
    when not supplied).  A zero numerator short-circuits to 0; S = 0 and
    rho = 0 with a nonzero numerator are errors.
    """
    gamma = as_weight(gamma, f.n)
    z = as_tube_point(z, f.n)
    w = as_tube_point(w, f.n)
    for name, p in (("z", z), ("w", w)):
        if not region.contains_point(p):
            raise ValueError("%s=%r is outside the region %r" % (name, p, region))
    num = abs(weighted_value(f, gamma, z) - weighted_value(f, gamma, w))
    if num == 0.0:
        return 0.0
    r = rho(z, w)
    if r == 0.0:
        raise ValueError("gap ratio undefined at pseudo-hyperbolic distance 0")
    S = sup if sup is not None else sup_estimate(f, gamma, region, budget, seed, inject=(z, w)).value
    if S == 0.0:
        raise ValueError("regional sup norm is 0; the normalized gap is undefined")
    return num / (S * r)


def split_bound_gap(
    f,
    gamma,
    phi_z,
    psi_z,
    z,
    h1,
    omega1,
    omega2,
    sups=None,
    budget=DEFAULT_BUDGET,
    seed=0,
):
    """Left and right side of the two-region split bound.

    lhs = |f(phi_z) - f(psi_z)| * prod (Im z_k)^{gamma_k}; rhs combines the
    regional sup norms S1 (over omega1, holding phi_z), S2 (over omega2,
    holding psi_z) and their union sup max(S1, S2) with the convex split
    h1 + h2 = 1:

        rhs = (h1 S1 + h2 S2) rho (Pphi + Ppsi) + max(S1, S2) rho (h2 Pphi + h1 Ppsi)

    where rho = rho(phi_z, psi_z) and Pphi = prod (Im z_k / Im phi_z_k)^{gamma_k}.
    The suite asserts lhs <= C * rhs for a calibrated constant C.
    """
    gamma = as_weight(gamma, f.n)
    z = as_tube_point(z, f.n)
    phi_z = as_tube_point(phi_z, f.n)
    psi_z = as_tube_point(psi_z, f.n)
    if not 0.0 <= h1 <= 1.0:
        raise ValueError("h1 must lie in [0, 1], got %r" % (h1,))
    h2 = 1.0 - h1
    if not omega1.contains_point(phi_z):
        raise ValueError("phi_z=%r is outside the first region" % (phi_z,))
    if not omega2.contains_point(psi_z):
        raise ValueError("psi_z=%r is outside the second region" % (psi_z,))

    wz = math.fsum(gk * math.log(zk.imag) for gk, zk in zip(gamma, z))
    lhs = abs(f(phi_z) - f(psi_z)) * safe_exp(wz)

    if sups is not None:
        s1, s2 = sups
    else:
        s1 = sup_estimate(f, gamma, omega1, budget, seed, inject=(phi_z,)).value
        s2 = sup_estimate(f, gamma, omega2, budget, seed, inject=(psi_z,)).value
    s12 = max(s1, s2)  # sup over a union is exactly the max of the two sups

    r = rho(phi_z, psi_z)
    p_phi = safe_exp(math.fsum(gk * (math.log(zk.imag) - math.log(pk.imag)) for gk, zk, pk in zip(gamma, z, phi_z)))
    p_psi = safe_exp(math.fsum(gk * (math.log(zk.imag) - math.log(pk.imag)) for gk, zk, pk in zip(gamma, z, psi_z)))
    rhs = (h1 * s1 + h2 * s2) * r * (p_phi + p_psi) + s12 * r * (h2 * p_phi + h1 * p_psi)
    return lhs, rhs
