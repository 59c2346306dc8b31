"""Pseudo-hyperbolic geometry on H and H^n (products of upper half-planes).

Provides the pseudo-hyperbolic distance d(z,w) = |z-w|/|z-conj(w)| on the
upper half-plane, its max-coordinate extension rho on H^n, pseudo-hyperbolic
polydiscs together with their exact Euclidean form, boundary-torus sampling,
and the region abstraction used by the supremum search (whole domain, box,
pseudo-hyperbolic polydisc, complement of a box).
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

# Points with smaller imaginary part are rejected at construction to keep
# denormal arithmetic out of every downstream quotient.
MIN_IM = 1e-300

# Standard sampling box for randomized property suites and validation.
SAMPLE_RE = 10.0
SAMPLE_IM_MIN = 1e-4
SAMPLE_IM_MAX = 1e4


def check_halfplane(c):
    """Validate a single coordinate; returns it as a complex number."""
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise ValueError("coordinate is not finite: %r" % (c,))
    if c.imag < MIN_IM:
        raise ValueError("coordinate not in the upper half-plane (Im >= %g required): %r" % (MIN_IM, c))
    return c


class TubePoint:
    """A point of H^n: n complex coordinates with Im >= MIN_IM."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        if isinstance(coords, complex):
            coords = (coords,)
        coords = tuple(check_halfplane(c) for c in coords)
        if not coords:
            raise ValueError("a tube point needs at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self):
        return len(self.coords)

    def imag(self):
        return tuple(c.imag for c in self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, k):
        return self.coords[k]

    def __eq__(self, other):
        return isinstance(other, TubePoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "TubePoint(%r)" % (self.coords,)

    def __setattr__(self, name, value):
        raise AttributeError("TubePoint is immutable")


def as_tube_point(z, n=None):
    """Coerce complex / sequence / TubePoint input, checking the dimension."""
    if not isinstance(z, TubePoint):
        z = TubePoint(z if not isinstance(z, (int, float, complex)) else (complex(z),))
    if n is not None and z.n != n:
        raise ValueError("dimension mismatch: expected %d coordinates, got %d" % (n, z.n))
    return z


def pseudo_dist(z, w):
    """Pseudo-hyperbolic distance on H: |z-w| / |z-conj(w)|, in [0, 1)."""
    z = check_halfplane(z)
    w = check_halfplane(w)
    return abs(z - w) / abs(z - w.conjugate())


def pseudo_dist_vec(z, w):
    """Vectorized pseudo_dist for arrays of half-plane coordinates."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.abs(z - w) / np.abs(z - np.conj(w))


def rho_components(z, w):
    """Per-coordinate pseudo-hyperbolic distances on H^n."""
    z = as_tube_point(z)
    w = as_tube_point(w, z.n)
    return tuple(pseudo_dist(zk, wk) for zk, wk in zip(z, w))


def rho(z, w):
    """Pseudo-hyperbolic distance on H^n: max of the coordinate distances."""
    return max(rho_components(z, w))


@dataclass(frozen=True)
class EuclideanDisc:
    """One coordinate's Euclidean disc; always strictly inside H."""

    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive, got %r" % (self.radius,))
        if not self.center.imag > self.radius:
            raise ValueError("disc %r leaves the upper half-plane" % (self,))

    def contains(self, w):
        return abs(complex(w) - self.center) < self.radius


def check_radii(delta, n=None):
    if isinstance(delta, (int, float)):
        delta = (delta,) if n is None else (delta,) * n
    delta = tuple(float(d) for d in delta)
    if any(not (0.0 < d < 1.0) for d in delta):
        raise ValueError("pseudo-hyperbolic radii must lie in (0, 1): %r" % (delta,))
    if n is not None and len(delta) != n:
        raise ValueError("dimension mismatch: expected %d radii, got %d" % (n, len(delta)))
    return delta


def disc_for(zk, dk):
    """Euclidean center/radius of the pseudo-hyperbolic disc of radius dk about zk."""
    zk = complex(zk)
    s = (1.0 + dk * dk) / (1.0 - dk * dk)
    r = 2.0 * dk / (1.0 - dk * dk) * zk.imag
    return EuclideanDisc(complex(zk.real, s * zk.imag), r)


def euclidean_polydisc(z, delta):
    """Per-coordinate Euclidean disc data of the pseudo-hyperbolic polydisc."""
    z = as_tube_point(z)
    delta = check_radii(delta, z.n)
    return [disc_for(zk, dk) for zk, dk in zip(z, delta)]


def polydisc_contains(z, delta, w):
    """True iff every coordinate distance satisfies d(z_k, w_k) < delta_k."""
    z = as_tube_point(z)
    delta = check_radii(delta, z.n)
    w = as_tube_point(w, z.n)
    return all(d < dk for d, dk in zip(rho_components(z, w), delta))


def circle_point(zk, t, theta):
    """The point at pseudo-hyperbolic distance exactly t from zk, at angle theta.

    t = 0 returns zk itself.
    """
    zk = complex(zk)
    if t == 0.0:
        return zk
    s = (1.0 + t * t) / (1.0 - t * t)
    r = 2.0 * t / (1.0 - t * t) * zk.imag
    return complex(zk.real + r * math.cos(theta), s * zk.imag + r * math.sin(theta))


def circle_point_vec(z, t, theta):
    """Vectorized circle_point over matching arrays."""
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    s = (1.0 + t * t) / (1.0 - t * t)
    r = 2.0 * t / (1.0 - t * t) * z.imag
    return z.real + r * np.cos(theta) + 1j * (s * z.imag + r * np.sin(theta))


def boundary_torus_samples(z, delta, m, seed=None):
    """m^n points with every coordinate exactly on its polydisc boundary.

    Uniform angle grids on each coordinate circle; a seed adds deterministic
    per-coordinate angle offsets.
    """
    if m < 1:
        raise ValueError("need m >= 1 sample angles, got %r" % (m,))
    z = as_tube_point(z)
    delta = check_radii(delta, z.n)
    offsets = np.zeros(z.n)
    if seed is not None:
        offsets = np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi, z.n)
    grids = []
    for k, (zk, dk) in enumerate(zip(z, delta)):
        angles = offsets[k] + 2.0 * math.pi * np.arange(m) / m
        grids.append([circle_point(zk, dk, th) for th in angles])
    return [TubePoint(combo) for combo in itertools.product(*grids)]


def sample_coords(rng, count, n, re_max=SAMPLE_RE, im_min=SAMPLE_IM_MIN, im_max=SAMPLE_IM_MAX):
    """(count, n) complex array from the standard sampling box.

    Re uniform in [-re_max, re_max], log Im uniform in [log im_min, log im_max].
    """
    re = rng.uniform(-re_max, re_max, (count, n))
    im = np.exp(rng.uniform(math.log(im_min), math.log(im_max), (count, n)))
    return re + 1j * im


def sample_in_ball(rng, z, delta, margin=1e-9):
    """Points at pseudo-hyperbolic distance < delta from matching centers z.

    The distance is uniform in [0, delta*(1-margin)] by construction, so the
    strict inequality d < delta never relies on rounding.
    """
    z = np.asarray(z, dtype=complex)
    t = rng.uniform(0.0, delta * (1.0 - margin), z.shape)
    theta = rng.uniform(0.0, 2.0 * math.pi, z.shape)
    return circle_point_vec(z, t, theta)


# regions of H^n for supremum estimation

_EPS_U = 1e-12
_LOG_IM_CAP = 700.0


class Region:
    """A subset of H^n with a unit-cube parameterization for search.

    Kinds: 'whole', 'box', 'polydisc', 'box-complement'.  Every region maps
    [0,1]^{2n} onto (a dense subset of) itself via to_points and inverts
    points back to parameters via from_point, so externally supplied
    witnesses can seed the local refinement.
    """

    def __init__(self, kind, n, re_bounds=None, im_bounds=None, center=None, radii=None):
        self.kind = kind
        self.n = int(n)
        if self.n < 1:
            raise ValueError("region dimension must be >= 1")
        self.re_bounds = None
        self.im_bounds = None
        self.center = None
        self.radii = None
        if kind in ("box", "box-complement"):
            self.re_bounds = tuple((float(a), float(b)) for a, b in re_bounds)
            self.im_bounds = tuple((float(a), float(b)) for a, b in im_bounds)
            if len(self.re_bounds) != self.n or len(self.im_bounds) != self.n:
                raise ValueError("need one Re and one Im interval per coordinate")
            for a, b in self.re_bounds:
                if not a <= b:
                    raise ValueError("Re bounds out of order: (%r, %r)" % (a, b))
            for a, b in self.im_bounds:
                if not 0.0 < a <= b:
                    raise ValueError("Im bounds must satisfy 0 < low <= high: (%r, %r)" % (a, b))
        elif kind == "polydisc":
            self.center = as_tube_point(center, self.n)
            self.radii = check_radii(radii, self.n)
        elif kind != "whole":
            raise ValueError("unknown region kind %r" % (kind,))

    @classmethod
    def whole(cls, n):
        return cls("whole", n)

    @classmethod
    def box(cls, re_bounds, im_bounds):
        return cls("box", len(re_bounds), re_bounds=re_bounds, im_bounds=im_bounds)

    @classmethod
    def polydisc(cls, center, radii):
        center = as_tube_point(center)
        return cls("polydisc", center.n, center=center, radii=radii)

    @classmethod
    def box_complement(cls, re_bounds, im_bounds):
        return cls("box-complement", len(re_bounds), re_bounds=re_bounds, im_bounds=im_bounds)

    def __repr__(self):
        if self.kind in ("box", "box-complement"):
            return "Region(%r, re=%r, im=%r)" % (self.kind, self.re_bounds, self.im_bounds)
        if self.kind == "polydisc":
            return "Region('polydisc', center=%r, radii=%r)" % (self.center, self.radii)
        return "Region('whole', n=%d)" % self.n

    @property
    def param_dim(self):
        return 2 * self.n

    def to_points(self, U):
        """Map (m, 2n) unit-cube parameters to (m, n) complex coordinates."""
        U = np.clip(np.asarray(U, dtype=float), _EPS_U, 1.0 - _EPS_U)
        u = U[:, 0::2]
        v = U[:, 1::2]
        if self.kind in ("whole", "box-complement"):
            re = np.tan(math.pi * (u - 0.5))
            logim = np.clip(np.tan(math.pi * (v - 0.5)), -_LOG_IM_CAP, _LOG_IM_CAP)
            return re + 1j * np.exp(logim)
        if self.kind == "box":
            rlo = np.array([b[0] for b in self.re_bounds])
            rhi = np.array([b[1] for b in self.re_bounds])
            ilo = np.log([b[0] for b in self.im_bounds])
            ihi = np.log([b[1] for b in self.im_bounds])
            return rlo + u * (rhi - rlo) + 1j * np.exp(ilo + v * (ihi - ilo))
        # polydisc: u scales the pseudo-radius, v is the angle
        c = np.array(self.center.coords)
        d = np.array(self.radii)
        t = d * np.minimum(u, 1.0 - 1e-9)
        return circle_point_vec(np.broadcast_to(c, u.shape), t, 2.0 * math.pi * v)

    def to_point(self, u):
        """Scalar version of to_points; returns a TubePoint."""
        P = self.to_points(np.asarray(u, dtype=float).reshape(1, -1))
        return TubePoint(tuple(P[0]))

    def from_point(self, z):
        """Unit-cube parameters whose image is (approximately) z."""
        z = as_tube_point(z, self.n)
        out = np.empty(2 * self.n)
        if self.kind in ("whole", "box-complement"):
            for k, zk in enumerate(z):
                out[2 * k] = 0.5 + math.atan(zk.real) / math.pi
                li = max(-_LOG_IM_CAP, min(_LOG_IM_CAP, math.log(zk.imag)))
                out[2 * k + 1] = 0.5 + math.atan(li) / math.pi
        elif self.kind == "box":
            for k, zk in enumerate(z):
                rlo, rhi = self.re_bounds[k]
                ilo, ihi = self.im_bounds[k]
                out[2 * k] = 0.5 if rhi == rlo else (zk.real - rlo) / (rhi - rlo)
                out[2 * k + 1] = 0.5 if ihi == ilo else (math.log(zk.imag) - math.log(ilo)) / (math.log(ihi) - math.log(ilo))
        else:
            for k, zk in enumerate(z):
                ck = self.center[k]
                t = pseudo_dist(ck, zk)
                out[2 * k] = min(t / self.radii[k], 1.0 - 1e-9)
                if t == 0.0:
                    out[2 * k + 1] = 0.0
                else:
                    s = (1.0 + t * t) / (1.0 - t * t)
                    ct = complex(ck.real, s * ck.imag)
                    theta = math.atan2((zk - ct).imag, (zk - ct).real)
                    out[2 * k + 1] = (theta / (2.0 * math.pi)) % 1.0
        return np.clip(out, 0.0, 1.0)

    def contains(self, P):
        """Boolean membership mask for an (m, n) complex coordinate array."""
        P = np.asarray(P, dtype=complex)
        valid = np.all(np.isfinite(P), axis=1) & np.all(P.imag > 0.0, axis=1)
        if self.kind == "whole":
            return valid
        if self.kind in ("box", "box-complement"):
            rlo = np.array([b[0] for b in self.re_bounds])
            rhi = np.array([b[1] for b in self.re_bounds])
            ilo = np.array([b[0] for b in self.im_bounds])
            ihi = np.array([b[1] for b in self.im_bounds])
            inside = np.all(
                (P.real >= rlo) & (P.real <= rhi) & (P.imag >= ilo) & (P.imag <= ihi), axis=1
            )
            return valid & (inside if self.kind == "box" else ~inside)
        c = np.array(self.center.coords)
        d = np.array(self.radii)
        with np.errstate(invalid="ignore"):
            dist = np.abs(P - c) / np.abs(P - np.conj(c))
        return valid & np.all(dist < d, axis=1)

    def contains_point(self, z):
        z = as_tube_point(z, self.n)
        return bool(self.contains(np.array(z.coords, dtype=complex).reshape(1, -1))[0])
