"""Component-wise rational self-maps of H^n and their little DSL.

Grammar (whitespace insignificant):

    selfmap    := expr (';' expr)*
    expr       := term (('+'|'-') term)*
    term       := factor (('*'|'/') factor)*
    factor     := ['-'] atom
    atom       := number | 'i' | coordinate | '(' expr ')'
    coordinate := 'z' digits          (1-based)
    number     := digits ['.' digits]

Components are classified structurally where possible (affine maps
lam*z + c with lam > 0 real and Im c >= 0, and real Moebius maps with
positive determinant both send H into H); everything else is General and
must earn its keep through numerical validation.
"""

import math
from dataclasses import dataclass

import numpy as np

from .expressions import (
    Add,
    Const,
    Coord,
    Div,
    EvalError,
    Mul,
    Neg,
    Sub,
    compile_expr,
    eval_value,
    free_coords,
    substitute,
)
from .growth import AnalyticFn
from .halfplane import (
    MIN_IM,
    TubePoint,
    as_tube_point,
    rho_components,
    sample_coords,
)


class ParseError(ValueError):
    """Syntax or semantic error in DSL text, with a character position."""

    def __init__(self, message, pos):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


class NotSelfMapAt(ValueError):
    """A component image left the upper half-plane at a specific point."""

    def __init__(self, point, k, image):
        super().__init__(
            "component %d maps %r to %r with Im = %r <= 0" % (k + 1, point, image, image.imag)
        )
        self.point = point
        self.k = k
        self.image = image


# tokenizer

_OPS = "+-*/();"


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            toks.append((ch, None, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                if j >= n or not text[j].isdigit():
                    raise ParseError("expected digits after decimal point", j)
                while j < n and text[j].isdigit():
                    j += 1
            toks.append(("num", float(text[i:j]), i))
            i = j
            continue
        if ch == "i":
            toks.append(("imag", None, i))
            i += 1
            continue
        if ch == "z":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError("expected a coordinate index after 'z'", i)
            toks.append(("coord", int(text[i + 1 : j]), i))
            i = j
            continue
        raise ParseError("unexpected character %r" % ch, i)
    toks.append(("end", None, n))
    return toks


class _Parser:
    def __init__(self, text, n=None):
        self.toks = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.next()
            rhs = self.factor()
            if op == "/":
                if rhs == Const(0j) or rhs == Neg(Const(0j)):
                    raise ParseError("division by the zero literal", pos)
                node = Div(node, rhs)
            else:
                node = Mul(node, rhs)
        return node

    def factor(self):
        if self.peek()[0] == "-":
            self.next()
            return Neg(self.atom())
        return self.atom()

    def atom(self):
        kind, value, pos = self.next()
        if kind == "num":
            return Const(complex(value))
        if kind == "imag":
            return Const(1j)
        if kind == "coord":
            if value < 1 or (self.n is not None and value > self.n):
                raise ParseError(
                    "unknown coordinate z%d (dimension is %s)" % (value, self.n), pos
                )
            return Coord(value - 1)
        if kind == "(":
            node = self.expr()
            kind2, _, pos2 = self.next()
            if kind2 != ")":
                raise ParseError("expected ')', got %r" % kind2, pos2)
            return node
        raise ParseError(
            "expected a number, 'i', a coordinate, or '(', got %r" % kind, pos
        )


def parse_component(text, n=None):
    """Parse a single expression; n bounds the coordinate indices if given."""
    p = _Parser(text, n)
    node = p.expr()
    kind, _, pos = p.peek()
    if kind != "end":
        raise ParseError("unexpected trailing input %r" % kind, pos)
    return node


# canonical printer

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2}


def _dec(x):
    """Plain decimal rendering (the grammar has no exponent notation)."""
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    from decimal import Decimal

    return format(Decimal(repr(x)), "f")


def to_text(node, _parent=0, _right=False):
    """Canonical text; parse(to_text(parse(s))) == parse(s) for all valid s."""
    if isinstance(node, Coord):
        return "z%d" % (node.k + 1)
    if isinstance(node, Const):
        c = complex(node.value)
        if c == 1j:
            return "i"
        if c.imag == 0.0:
            if c.real >= 0.0:
                return _dec(c.real)
            return to_text(Neg(Const(-c)), _parent, _right)
        if c.real == 0.0:
            body = "i" if c.imag == 1.0 else ("%s*i" % _dec(c.imag) if c.imag >= 0 else "-%s*i" % _dec(-c.imag))
            return body if _parent < 2 or c.imag >= 0 else "(%s)" % body
        sign = "+" if c.imag >= 0.0 else "-"
        return "(%s %s %s*i)" % (_dec(c.real), sign, _dec(abs(c.imag)))
    if isinstance(node, Neg):
        body = "-" + to_text(node.arg, 4)
        return body if _parent < 4 else "(%s)" % body
    prec = _PREC[type(node)]
    op = {Add: " + ", Sub: " - ", Mul: " * ", Div: " / "}[type(node)]
    body = to_text(node.left, prec) + op + to_text(node.right, prec, True)
    if prec < _parent or (prec == _parent and _right):
        return "(%s)" % body
    return body


# structural classification

@dataclass(frozen=True)
class Affine:
    lam: float
    c: complex


@dataclass(frozen=True)
class Moebius:
    a: float
    b: float
    c: float
    d: float

    @property
    def det(self):
        return self.a * self.d - self.b * self.c


@dataclass(frozen=True)
class General:
    pass


class _NotRational(Exception):
    pass


_DEG_CAP = 8


def _pmul(p, q):
    out = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            k = tuple(sorted(k1 + k2))
            if len(k) > _DEG_CAP:
                raise _NotRational()
            out[k] = out.get(k, 0j) + c1 * c2
    return {k: c for k, c in out.items() if c != 0}


def _padd(p, q, sign=1):
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, 0j) + sign * c
    return {k: c for k, c in out.items() if c != 0}


_ONE = {(): 1 + 0j}


def _to_rational(node):
    """(numerator, denominator) polynomial dicts; keys are sorted index tuples."""
    if isinstance(node, Coord):
        return {(node.k,): 1 + 0j}, dict(_ONE)
    if isinstance(node, Const):
        c = complex(node.value)
        return ({(): c} if c != 0 else {}), dict(_ONE)
    if isinstance(node, Neg):
        num, den = _to_rational(node.arg)
        return {k: -c for k, c in num.items()}, den
    if isinstance(node, (Add, Sub)):
        n1, d1 = _to_rational(node.left)
        n2, d2 = _to_rational(node.right)
        sign = 1 if isinstance(node, Add) else -1
        return _padd(_pmul(n1, d2), _pmul(n2, d1), sign), _pmul(d1, d2)
    if isinstance(node, Mul):
        n1, d1 = _to_rational(node.left)
        n2, d2 = _to_rational(node.right)
        return _pmul(n1, n2), _pmul(d1, d2)
    if isinstance(node, Div):
        n1, d1 = _to_rational(node.left)
        n2, d2 = _to_rational(node.right)
        den = _pmul(d1, n2)
        if not den:
            raise _NotRational()
        return _pmul(n1, d2), den
    raise _NotRational()


def _lin_coeffs(p, var):
    """(slope, intercept) of a polynomial that is linear in a single variable."""
    slope = p.get((var,), 0j)
    inter = p.get((), 0j)
    return slope, inter


_REAL_TOL = 1e-12


def _near_real(c, scale):
    return abs(c.imag) <= _REAL_TOL * max(scale, 1e-30)


def classify_component(expr):
    """Affine / Moebius / General for one component expression."""
    try:
        num, den = _to_rational(expr)
    except _NotRational:
        return General()
    vars_used = {v for key in list(num) + list(den) for v in key}
    if len(vars_used) > 1:
        return General()
    if any(len(k) > 1 for k in list(num) + list(den)):
        return General()
    var = next(iter(vars_used)) if vars_used else None

    a, b = _lin_coeffs(num, var) if var is not None else (0j, num.get((), 0j))
    c, d = _lin_coeffs(den, var) if var is not None else (0j, den.get((), 0j))

    if c == 0:
        if d == 0:
            return General()
        lam = a / d
        const = b / d
        if lam.imag == 0.0 and lam.real > 0.0 and const.imag >= 0.0:
            return Affine(lam.real, complex(const))
        return General()

    scale = max(abs(a), abs(b), abs(c), abs(d))
    if all(_near_real(x, scale) for x in (a, b, c, d)):
        ar, br, cr, dr = a.real, b.real, c.real, d.real
        if ar * dr - br * cr > 0.0:
            return Moebius(ar, br, cr, dr)
        return General()
    # try a common complex phase: divide by the largest coefficient
    pivot = max((a, b, c, d), key=abs)
    an, bn, cn, dn = a / pivot, b / pivot, c / pivot, d / pivot
    if all(_near_real(x, 1.0) for x in (an, bn, cn, dn)):
        if an.real * dn.real - bn.real * cn.real > 0.0:
            return Moebius(an.real, bn.real, cn.real, dn.real)
    return General()


@dataclass(frozen=True)
class ValidationReport:
    verdict: str  # 'structurally-valid' | 'numerically-valid' | 'rejected'
    counterexample: object  # TubePoint or None
    samples_checked: int


class SelfMap:
    """n component expressions, evaluated and validated as a map H^n -> H^n."""

    __slots__ = ("components", "n", "classifications")

    def __init__(self, components, n):
        components = tuple(components)
        n = int(n)
        if len(components) != n:
            raise ValueError("expected %d component expressions, got %d" % (n, len(components)))
        for expr in components:
            bad = [k for k in free_coords(expr) if k >= n]
            if bad:
                raise ValueError("component reads coordinate z%d but the dimension is %d" % (bad[0] + 1, n))
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "classifications", tuple(classify_component(e) for e in components))

    def __setattr__(self, name, value):
        raise AttributeError("SelfMap is immutable")

    def __eq__(self, other):
        return isinstance(other, SelfMap) and self.components == other.components and self.n == other.n

    def __hash__(self):
        return hash((self.components, self.n))

    def __repr__(self):
        return "SelfMap(%r)" % (self.text(),)

    def text(self):
        return "; ".join(to_text(e) for e in self.components)

    @property
    def structurally_valid(self):
        return all(not isinstance(c, General) for c in self.classifications)

    def __call__(self, z):
        return eval_map(self, z)

    def eval_vec(self, P):
        """(images, valid) for an (m, n) coordinate array.

        valid marks rows whose every component image is finite with
        Im >= MIN_IM; invalid rows hold whatever the arithmetic produced.
        """
        P = np.asarray(P, dtype=complex)
        cols = []
        for expr in self.components:
            col = np.asarray(compile_expr(expr, "value_vec")(P.T), dtype=complex)
            cols.append(np.broadcast_to(col, (P.shape[0],)))
        images = np.stack(cols, axis=1)
        with np.errstate(invalid="ignore"):
            valid = np.all(np.isfinite(images), axis=1) & np.all(images.imag >= MIN_IM, axis=1)
        return images, valid


def parse_selfmap(text, n):
    """Parse a semicolon-separated list of n component expressions."""
    n = int(n)
    if n < 1:
        raise ValueError("dimension must be >= 1")
    p = _Parser(text, n)
    components = [p.expr()]
    while p.peek()[0] == ";":
        p.next()
        components.append(p.expr())
    kind, _, pos = p.peek()
    if kind != "end":
        raise ParseError("unexpected trailing input %r" % kind, pos)
    if len(components) != n:
        raise ParseError(
            "expected %d semicolon-separated components, got %d" % (n, len(components)), pos
        )
    return SelfMap(components, n)


def eval_map(phi, z):
    """Evaluate the map; the result is a TubePoint, so Im > 0 is enforced."""
    z = as_tube_point(z, phi.n)
    images = []
    for k, expr in enumerate(phi.components):
        v = eval_value(expr, z.coords)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise EvalError("component %d is not finite at %r" % (k + 1, z))
        if v.imag < MIN_IM:
            raise NotSelfMapAt(z, k, v)
        images.append(v)
    return TubePoint(images)


_ANCHOR_RE = (0.0, 1.0, -1.0, 0.5)
_SCHEDULE_DECADES = 12


def _validation_points(n, budget, seed):
    """Anchors, near-boundary schedules, then seeded random box samples."""
    pts = [TubePoint((complex(r, y),) * n) for r in _ANCHOR_RE for y in (1.0, 2.0, 0.5)]
    for k in range(n):
        for j in range(1, _SCHEDULE_DECADES + 1):
            for coord in (
                complex(0.0, 10.0 ** -j),
                complex(0.0, 10.0 ** j),
                complex(10.0 ** j, 1.0),
                complex(-(10.0 ** j), 1.0),
            ):
                base = [1j] * n
                base[k] = coord
                pts.append(TubePoint(base))
    rng = np.random.default_rng(seed)
    for row in sample_coords(rng, max(0, budget), n):
        pts.append(TubePoint(tuple(row)))
    return pts


def validate(phi, budget=200, seed=0):
    """Structural check for Affine/Moebius components; sampling for the rest.

    The verdict is evidence, not a certificate: a General map is
    'numerically-valid' when no sampled point (anchors, boundary schedules,
    seeded box samples) produces an image outside H^n or an evaluation
    failure, and 'rejected' with a counterexample otherwise.
    """
    if budget < 1:
        raise ValueError("validation budget must be >= 1")
    if phi.structurally_valid:
        return ValidationReport("structurally-valid", None, 0)
    checked = 0
    for z in _validation_points(phi.n, budget, seed):
        checked += 1
        try:
            eval_map(phi, z)
        except (NotSelfMapAt, EvalError):
            return ValidationReport("rejected", z, checked)
    return ValidationReport("numerically-valid", None, checked)


def pullback(phi, f):
    """The composition f(phi(.)) as an evaluable function."""
    if f.n != phi.n:
        raise ValueError("dimension mismatch: map has n=%d, function has n=%d" % (phi.n, f.n))
    return AnalyticFn(substitute(f.expr, phi.components), f.n)


def rho_components_at(phi, psi, z):
    """Per-coordinate pseudo-hyperbolic distances between the two images."""
    return rho_components(eval_map(phi, z), eval_map(psi, z))


def rho_at(phi, psi, z):
    """rho(phi(z), psi(z)) in [0, 1)."""
    return max(rho_components_at(phi, psi, z))
