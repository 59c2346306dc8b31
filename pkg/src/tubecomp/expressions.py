"""Expression trees for closed-form functions on products of half-planes.

One immutable AST backs both the self-map DSL (field operations over
coordinates and complex constants) and the analytic test functions (which
additionally use principal real powers).  Evaluation is compiled once per
tree into plain Python / numpy lambdas and cached:

* ``value``      -- scalar complex evaluation at one point,
* ``value_vec``  -- vectorized complex evaluation over coordinate arrays,
* ``logabs``     -- scalar log-modulus,
* ``logabs_vec`` -- vectorized log-modulus.

The log-modulus forms decompose products, quotients and powers
structurally (log|a*b| = log|a| + log|b|, log|w^s| = s*log|w|), so moduli
remain meaningful far outside double range; sums are evaluated as values
first and only then reduced to a modulus.
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Denominators below this modulus are evaluation errors, not infinities.
DIV_FLOOR = 1e-300
_LOG_DIV_FLOOR = math.log(DIV_FLOOR)


class EvalError(ArithmeticError):
    """An expression could not be evaluated at the given point."""


class BranchCutError(EvalError):
    """A principal power was taken on the closed negative real axis."""


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Coord(Expr):
    k: int  # 0-based coordinate index


@dataclass(frozen=True)
class Const(Expr):
    value: complex


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: float  # real exponent, principal branch


def free_coords(node):
    """Set of coordinate indices the expression reads."""
    if isinstance(node, Coord):
        return {node.k}
    if isinstance(node, Const):
        return set()
    if isinstance(node, Neg):
        return free_coords(node.arg)
    if isinstance(node, Pow):
        return free_coords(node.base)
    return free_coords(node.left) | free_coords(node.right)


def substitute(node, repl):
    """Replace every Coord(k) by repl[k]; used for composition pullbacks."""
    if isinstance(node, Coord):
        return repl[node.k]
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, repl))
    if isinstance(node, Pow):
        return Pow(substitute(node.base, repl), node.exponent)
    cls = type(node)
    return cls(substitute(node.left, repl), substitute(node.right, repl))


# evaluation helpers injected into compiled lambdas


def principal_power(w, s):
    """w**s on the principal branch, Arg in (-pi, pi).

    Rejects the closed negative real axis (including 0), where the
    principal branch is discontinuous or undefined.
    """
    w = complex(w)
    if w.imag == 0.0 and w.real <= 0.0:
        raise BranchCutError("principal power base on closed negative real axis: %r" % (w,))
    return cmath.exp(s * cmath.log(w))


def _div(a, b):
    if abs(b) < DIV_FLOOR:
        raise EvalError("division by near-zero denominator %r" % (b,))
    return a / b


def _ln_abs(v):
    a = abs(v)
    if a == 0.0:
        return -math.inf
    if math.isnan(a):
        return math.nan
    if math.isinf(a):
        return math.inf
    return math.log(a)


def _div_vec(a, b):
    with np.errstate(all="ignore"):
        bad = np.abs(b) < DIV_FLOOR
        if np.any(bad):
            return np.where(bad, np.nan, a / np.where(bad, 1.0, b))
        return a / b


def _pow_vec(w, s):
    w = np.asarray(w, dtype=complex)
    bad = (w.imag == 0.0) & (w.real <= 0.0)
    with np.errstate(all="ignore"):
        out = np.exp(s * np.log(np.where(bad, 1.0, w)))
    return np.where(bad, np.nan + 0j, out)


def _ln_abs_vec(v):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(np.abs(v))


def _ln_abs_scalar_const(c):
    a = abs(c)
    return -math.inf if a == 0.0 else math.log(a)


class _Emitter:
    """Builds one Python lambda source string for a tree and mode."""

    def __init__(self, vector):
        self.vector = vector
        self.consts = []

    def const(self, c):
        self.consts.append(c)
        return "C[%d]" % (len(self.consts) - 1)

    def value(self, node):
        if isinstance(node, Coord):
            return "Z[%d]" % node.k
        if isinstance(node, Const):
            return self.const(complex(node.value))
        if isinstance(node, Neg):
            return "(-%s)" % self.value(node.arg)
        if isinstance(node, Add):
            return "(%s + %s)" % (self.value(node.left), self.value(node.right))
        if isinstance(node, Sub):
            return "(%s - %s)" % (self.value(node.left), self.value(node.right))
        if isinstance(node, Mul):
            return "(%s * %s)" % (self.value(node.left), self.value(node.right))
        if isinstance(node, Div):
            fn = "_div_vec" if self.vector else "_div"
            return "%s(%s, %s)" % (fn, self.value(node.left), self.value(node.right))
        if isinstance(node, Pow):
            fn = "_pow_vec" if self.vector else "_pp"
            return "%s(%s, %r)" % (fn, self.value(node.base), float(node.exponent))
        raise TypeError("unknown node %r" % (node,))

    def logabs(self, node):
        # structural decomposition; falls back to |value| for sums
        if isinstance(node, Neg):
            return self.logabs(node.arg)
        if isinstance(node, Const):
            return self.const(_ln_abs_scalar_const(complex(node.value)))
        if isinstance(node, Mul):
            return "(%s + %s)" % (self.logabs(node.left), self.logabs(node.right))
        if isinstance(node, Div):
            la, lb = self.logabs(node.left), self.logabs(node.right)
            if self.vector:
                return "_la_div_vec(%s, %s)" % (la, lb)
            return "_la_div(%s, %s)" % (la, lb)
        if isinstance(node, Pow):
            return "(%r * %s)" % (float(node.exponent), self.logabs(node.base))
        fn = "_ln_abs_vec" if self.vector else "_ln_abs"
        return "%s(%s)" % (fn, self.value(node))


def _la_div(la, lb):
    if lb < _LOG_DIV_FLOOR:
        raise EvalError("division by near-zero denominator (log-modulus %r)" % (lb,))
    return la - lb


def _la_div_vec(la, lb):
    la = np.asarray(la, dtype=float)
    lb = np.asarray(lb, dtype=float)
    with np.errstate(all="ignore"):
        return np.where(lb < _LOG_DIV_FLOOR, np.nan, la - lb)


_NAMESPACE = {
    "_div": _div,
    "_div_vec": _div_vec,
    "_pp": principal_power,
    "_pow_vec": _pow_vec,
    "_ln_abs": _ln_abs,
    "_ln_abs_vec": _ln_abs_vec,
    "_la_div": _la_div,
    "_la_div_vec": _la_div_vec,
}


@lru_cache(maxsize=1024)
def compile_expr(node, mode):
    """Compile a tree into a callable.

    mode is one of 'value', 'value_vec', 'logabs', 'logabs_vec'.  The
    callable takes Z, a sequence of coordinate values (scalars for the
    scalar modes, broadcastable complex arrays for the vector modes).
    Vector modes signal bad points (near-zero denominators, branch-cut
    bases) with NaN entries instead of raising.
    """
    vector = mode.endswith("_vec")
    em = _Emitter(vector)
    body = em.logabs(node) if mode.startswith("logabs") else em.value(node)
    ns = dict(_NAMESPACE)
    ns["C"] = tuple(em.consts)
    fn = eval("lambda Z: %s" % body, ns)  # noqa: S307 - source built locally from the tree
    fn.__doc__ = body
    if vector:
        raw = fn

        def fn(Z):
            with np.errstate(all="ignore"):
                return raw(Z)

        fn.__doc__ = body
    return fn


def eval_value(node, coords):
    """Scalar complex value of the expression at the coordinate tuple."""
    return complex(compile_expr(node, "value")(tuple(coords)))


def eval_logabs(node, coords):
    """Scalar log-modulus, stable for products/quotients/powers."""
    return float(compile_expr(node, "logabs")(tuple(coords)))
