"""Planar similitude systems and their symbolic coding.

A system is a finite list of contracting similitudes F_i(z) = r_i M_i z + t_i
where M_i is a rotation (orientation +1) or a reflection (orientation -1).
Finite words over {1..m} index composed maps; the empty word is the identity.
All angles live in [0, 2*pi) and comparisons are circular.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigError, LevelTooLarge, SymbolOutOfRange

TWO_PI = 2.0 * math.pi

Word = tuple  # tuple of 1-based symbols


def norm_angle(t):
    """Reduce an angle into [0, 2*pi)."""
    t = math.fmod(t, TWO_PI)
    return t + TWO_PI if t < 0.0 else t


def circ_dist(a, b):
    """Circular distance between two angles, in [0, pi]."""
    d = abs(math.fmod(a - b, TWO_PI))
    return min(d, TWO_PI - d)


def parse_word(text):
    """Parse a digit string like '213' into a word tuple."""
    if text in ("", "-"):
        return ()
    try:
        return tuple(int(c) for c in text)
    except ValueError:
        raise SymbolOutOfRange(f"bad word {text!r}")


def word_str(u):
    return "".join(str(s) for s in u)


@dataclass(frozen=True)
class Similitude:
    """One contracting planar map: ratio, angle, orientation flag, translation."""

    r: float
    theta: float
    orient: int  # +1 rotation, -1 contains a reflection
    tx: float
    ty: float

    def __post_init__(self):
        if not (0.0 < self.r < 1.0):
            raise ConfigError(f"ratio {self.r} outside (0,1)")
        if self.orient not in (1, -1):
            raise ConfigError(f"orientation {self.orient} not in {{+1,-1}}")
        object.__setattr__(self, "theta", norm_angle(self.theta))

    def matrix(self):
        c, s = math.cos(self.theta), math.sin(self.theta)
        o = self.orient
        return np.array([[c, -o * s], [s, o * c]])

    def apply(self, p):
        x, y = p
        c, s = math.cos(self.theta), math.sin(self.theta)
        o = self.orient
        return (
            self.r * (c * x - o * s * y) + self.tx,
            self.r * (s * x + o * c * y) + self.ty,
        )

    def fixed_point(self):
        """Solve z = F(z); the 2x2 system (I - r M) z = t."""
        a = np.eye(2) - self.r * self.matrix()
        x, y = np.linalg.solve(a, np.array([self.tx, self.ty]))
        return (float(x), float(y))


@dataclass(frozen=True)
class CylinderGeometry:
    """Parameters of a composed map F_u: ratio product, net angle, orientation,
    translation.  log_r duplicates log(r) so that very long words stay usable
    after r underflows."""

    r: float
    theta: float
    orient: int
    tx: float
    ty: float
    log_r: float = 0.0

    def apply(self, p):
        x, y = p
        c, s = math.cos(self.theta), math.sin(self.theta)
        o = self.orient
        return (
            self.r * (c * x - o * s * y) + self.tx,
            self.r * (s * x + o * c * y) + self.ty,
        )

    def matrix(self):
        c, s = math.cos(self.theta), math.sin(self.theta)
        o = self.orient
        return np.array([[c, -o * s], [s, o * c]])


IDENTITY = CylinderGeometry(1.0, 0.0, 1, 0.0, 0.0, 0.0)


def compose_geoms(g, h):
    """Geometry of F_g o F_h (g applied after h)."""
    tx, ty = g.apply((h.tx, h.ty))
    return CylinderGeometry(
        r=g.r * h.r,
        theta=norm_angle(g.theta + g.orient * h.theta),
        orient=g.orient * h.orient,
        tx=tx,
        ty=ty,
        log_r=g.log_r + h.log_r,
    )


def geom_power(g, k):
    """g composed with itself k times, by binary exponentiation."""
    acc = IDENTITY
    base = g
    while k > 0:
        if k & 1:
            acc = compose_geoms(acc, base)
        base = compose_geoms(base, base)
        k >>= 1
    return acc


@dataclass(frozen=True)
class TailWord:
    """Eventually periodic infinite sequence prefix . period period ...

    Canonical form: primitive period, and the prefix never ends with the last
    period symbol (it is absorbed into a rotation of the period), so equality
    of representations is equality of the represented sequences.
    """

    prefix: Word
    period: Word

    def __post_init__(self):
        if not self.period:
            raise ConfigError("TailWord period must be nonempty")
        prefix, period = self.prefix, self.period
        # primitive period
        n = len(period)
        for d in range(1, n):
            if n % d == 0 and period[:d] * (n // d) == period:
                period = period[:d]
                n = d
                break
        # absorb prefix tail into the period by rotating it
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = (period[-1],) + period[:-1]
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "period", tuple(period))

    def head(self, n):
        """First n symbols of the represented sequence."""
        out = list(self.prefix[:n])
        i = 0
        while len(out) < n:
            out.append(self.period[i % len(self.period)])
            i += 1
        return tuple(out)


def similarity_dimension(ratios):
    """Solve sum r_i^gamma = 1 by bisection on the decreasing sum."""
    ratios = list(ratios)
    if not ratios:
        raise ConfigError("empty ratio list")
    for r in ratios:
        if not (0.0 < r < 1.0):
            raise ConfigError(f"ratio {r} outside (0,1)")

    def f(g):
        return math.fsum(r**g for r in ratios)

    lo, hi = 0.0, 1.0
    while f(hi) > 1.0:
        lo, hi = hi, 2.0 * hi
    # f(lo) >= 1 >= f(hi)
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if f(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class IFS:
    """A similitude system together with its derived constants: similarity
    dimension, enclosing invariant disk and the diameter bound D = 2*R0."""

    maps: tuple
    gamma: float
    r_min: float
    center: tuple
    R0: float
    D: float

    @classmethod
    def from_maps(cls, maps):
        maps = tuple(maps)
        if not maps:
            raise ConfigError("no maps")
        gamma = similarity_dimension([f.r for f in maps])
        center, R0 = _enclosing_disk(maps)
        return cls(
            maps=maps,
            gamma=gamma,
            r_min=min(f.r for f in maps),
            center=center,
            R0=R0,
            D=2.0 * R0,
        )

    @classmethod
    def from_dict(cls, data):
        try:
            raw_maps = data["maps"]
        except (KeyError, TypeError):
            raise ConfigError("missing 'maps' list")
        if not isinstance(raw_maps, list) or not raw_maps:
            raise ConfigError("'maps' must be a nonempty list")
        maps = []
        for i, m in enumerate(raw_maps):
            extra = set(m) - {"r", "theta", "theta_over_pi", "reflect", "tx", "ty"}
            if extra:
                raise ConfigError(f"map {i}: unknown keys {sorted(extra)}")
            if ("theta" in m) == ("theta_over_pi" in m):
                raise ConfigError(f"map {i}: exactly one of theta/theta_over_pi")
            theta = m["theta"] if "theta" in m else m["theta_over_pi"] * math.pi
            try:
                maps.append(
                    Similitude(
                        r=float(m["r"]),
                        theta=float(theta),
                        orient=-1 if m.get("reflect", False) else 1,
                        tx=float(m["tx"]),
                        ty=float(m["ty"]),
                    )
                )
            except KeyError as e:
                raise ConfigError(f"map {i}: missing field {e}")
        return cls.from_maps(maps)

    @classmethod
    def from_json(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(str(e))
        return cls.from_dict(data)

    @property
    def m(self):
        return len(self.maps)

    def geom(self, symbol):
        if not (1 <= symbol <= len(self.maps)):
            raise SymbolOutOfRange(f"symbol {symbol} outside 1..{len(self.maps)}")
        f = self.maps[symbol - 1]
        return CylinderGeometry(f.r, f.theta, f.orient, f.tx, f.ty, math.log(f.r))

    def compose(self, u):
        """Geometry of F_u; the empty word gives the identity."""
        g = IDENTITY
        for s in u:
            g = compose_geoms(g, self.geom(s))
        return g

    def mu_mass(self, u):
        """Natural-measure mass of the cylinder [u]: r_u^gamma."""
        g = self.compose(u)
        return math.exp(self.gamma * g.log_r)

    def mass_band(self, r, cap=2_000_000):
        """All words s with r*r_min < r_s <= r, in depth-first symbol order."""
        if not (0.0 < r < 1.0):
            raise ConfigError(f"band level {r} outside (0,1)")
        low = r * self.r_min
        out = []

        def descend(word, r_s):
            if len(out) > cap:
                raise LevelTooLarge(f"mass band exceeds cap {cap}")
            if r_s <= r and word:
                out.append(tuple(word))
            for i, f in enumerate(self.maps, start=1):
                child = r_s * f.r
                if child > low:
                    word.append(i)
                    descend(word, child)
                    word.pop()

        descend([], 1.0)
        return out

    def pi_point(self, u, anchor, tol=1e-12):
        """Approximate the coded point of u . anchor, with a rigorous error radius.

        The anchor's period is iterated until the residual contraction factor
        drops below tol; the returned point is within error_radius of the true
        coded point (both lie in the same image of the enclosing disk).
        """
        g_per = self.compose(anchor.period)
        if g_per.log_r >= 0.0:
            raise ConfigError("anchor period does not contract")
        k = max(1, math.ceil(math.log(tol) / g_per.log_r))
        g_tail = compose_geoms(self.compose(anchor.prefix), geom_power(g_per, k))
        q = g_tail.apply(self.center)
        g_u = self.compose(u)
        p = g_u.apply(q)
        err = self.D * math.exp(min(g_u.log_r + g_tail.log_r, 0.0))
        return p, err


def _enclosing_disk(maps):
    center = maps[0].fixed_point()
    r0 = 0.0
    for f in maps:
        fx, fy = f.apply(center)
        d = math.hypot(fx - center[0], fy - center[1])
        if f.r < 1.0:
            r0 = max(r0, d / (1.0 - f.r))
    return center, r0


def enclosing_disk(ifs):
    """Invariant disk (center, R0): center at map 1's fixed point."""
    return ifs.center, ifs.R0


# ---------------------------------------------------------------------------
# Convex bodies used for projection intervals.


class DiskBody:
    """The enclosing disk; projections are closed-form."""

    def __init__(self, center, radius):
        self.center = center
        self.radius = radius

    def interval(self, geom, theta):
        cx, cy = geom.apply(self.center)
        p = cx * math.cos(theta) + cy * math.sin(theta)
        h = geom.r * self.radius
        return p - h, p + h


class HullBody:
    """A certified invariant convex polygon (possibly a degenerate segment)."""

    def __init__(self, vertices):
        self.vertices = np.asarray(vertices, dtype=float)

    def interval(self, geom, theta):
        m = geom.matrix()
        pts = geom.r * self.vertices @ m.T + np.array([geom.tx, geom.ty])
        proj = pts[:, 0] * math.cos(theta) + pts[:, 1] * math.sin(theta)
        return float(proj.min()), float(proj.max())


def _convex_hull(points):
    """Monotone chain; collinear input collapses to its two extreme points."""
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # fully collinear: keep the extremes
        return [pts[0], pts[-1]]
    return hull


def _contains(vertices, p, tol):
    n = len(vertices)
    if n == 1:
        return math.dist(vertices[0], p) <= tol
    if n == 2:
        (ax, ay), (bx, by) = vertices
        vx, vy = bx - ax, by - ay
        L2 = vx * vx + vy * vy
        if L2 == 0.0:
            return math.dist(vertices[0], p) <= tol
        t = ((p[0] - ax) * vx + (p[1] - ay) * vy) / L2
        t = min(1.0, max(0.0, t))
        return math.dist((ax + t * vx, ay + t * vy), p) <= tol
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) < -tol:
            return False
    return True


def attractor_hull(ifs, depth=6, tol=1e-9):
    """Convex polygon refinement of the enclosing disk.

    Samples the attractor at the given depth (cylinder images of every map's
    fixed point), takes the convex hull and then inflates it about its centroid
    until the vertex check F_i(P) subset P certifies invariance.
    """
    from .errors import HullNotInvariant

    fixes = [f.fixed_point() for f in ifs.maps]
    pts = np.array(fixes, dtype=float)
    for _ in range(depth):
        layers = []
        for f in ifs.maps:
            m = f.matrix()
            layers.append(f.r * pts @ m.T + np.array([f.tx, f.ty]))
        pts = np.vstack(layers)
        if len(pts) > 200_000:
            break
    hull = _convex_hull([tuple(p) for p in pts] + fixes)
    cx = sum(p[0] for p in hull) / len(hull)
    cy = sum(p[1] for p in hull) / len(hull)
    lam = 0.0
    for _ in range(60):
        verts = [(cx + (1 + lam) * (x - cx), cy + (1 + lam) * (y - cy)) for x, y in hull]
        ok = all(
            _contains(verts, f.apply(v), tol) for f in ifs.maps for v in verts
        )
        if ok:
            return HullBody(verts)
        lam = max(2.0 * lam, ifs.r_min ** depth)
    raise HullNotInvariant("could not certify an invariant hull")
