"""Search for and verification of relatively-close cylinder families.

A family certificate carries words, the closeness parameter eps, the projection
angle theta, a shared-tail witness per pair and the measured slacks of the
three closeness conditions:

  (i)   size ratio r_u/r_v inside (e^-eps, e^eps)
  (ii)  same orientation, angles within eps
  (iii) projections onto the theta-line at a common tail within
        eps * D * min(r_u, r_v)

Constructors never emit a certificate that fails an independent re-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    BudgetExhausted,
    Indeterminate,
    NoNetWithinBound,
    NoReflectorAvailable,
    PreconditionViolated,
    VerificationFailed,
)
from .ifs import TWO_PI, TailWord, circ_dist, norm_angle, word_str
from .rotation import epsilon_net, find_rotation_word

COINCIDENCE_TOL = 1e-9  # exact-coincidence surrogate, relative to D*min(r)


@dataclass(frozen=True)
class PairReport:
    passed: bool
    slack_i: float
    slack_ii: float
    slack_iii: float


@dataclass
class SearchBudget:
    max_depth: int = 12
    max_band: int = 500_000
    p_max: int = 1_000_000


@dataclass
class RelCloseCertificate:
    words: tuple
    eps: float
    theta: float
    omegas: dict  # (u, v) sorted pair -> TailWord
    slacks: dict  # (u, v) sorted pair -> PairReport
    provenance: dict = field(default_factory=dict)

    def omega(self, u, v):
        return self.omegas[tuple(sorted((u, v)))]

    def pairs(self):
        ws = self.words
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                yield ws[i], ws[j]

    def to_dict(self):
        return {
            "words": [word_str(w) for w in self.words],
            "eps": self.eps,
            "theta": self.theta,
            "omegas": [
                {
                    "pair": [word_str(u), word_str(v)],
                    "prefix": word_str(om.prefix),
                    "period": word_str(om.period),
                }
                for (u, v), om in sorted(self.omegas.items())
            ],
            "slacks": [
                {
                    "pair": [word_str(u), word_str(v)],
                    "slack_i": rep.slack_i,
                    "slack_ii": rep.slack_ii,
                    "slack_iii": rep.slack_iii,
                }
                for (u, v), rep in sorted(self.slacks.items())
            ],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data):
        from .ifs import parse_word

        omegas = {
            tuple(sorted((parse_word(e["pair"][0]), parse_word(e["pair"][1])))): TailWord(
                parse_word(e["prefix"]), parse_word(e["period"])
            )
            for e in data["omegas"]
        }
        return cls(
            words=tuple(parse_word(w) for w in data["words"]),
            eps=float(data["eps"]),
            theta=float(data["theta"]),
            omegas=omegas,
            slacks={},
            provenance=data.get("provenance", {}),
        )


def _project(p, theta):
    return p[0] * math.cos(theta) + p[1] * math.sin(theta)


def check_relclose(ifs, u, v, eps, theta, omega):
    """Independent verifier for one pair; slacks are margins to violation
    (all positive means pass).  Raises Indeterminate when coded-point error
    radii exceed 1% of the offset threshold even at the deepest anchor."""
    if eps <= 0.0:
        raise PreconditionViolated("eps > 0 required")
    gu = ifs.compose(u)
    gv = ifs.compose(v)
    slack_i = eps - abs(gu.log_r - gv.log_r)
    if gu.orient != gv.orient:
        slack_ii = -math.inf
    else:
        slack_ii = eps - circ_dist(gu.theta, gv.theta)
    thresh = eps * ifs.D * math.exp(min(gu.log_r, gv.log_r))
    slack_iii = -math.inf
    if ifs.D == 0.0:
        slack_iii = 0.0
    else:
        for tol in (1e-12, 1e-15):
            pu, eu = ifs.pi_point(u, omega, tol=tol)
            pv, ev = ifs.pi_point(v, omega, tol=tol)
            if eu + ev <= 0.01 * thresh:
                offset = abs(_project(pu, theta) - _project(pv, theta))
                slack_iii = thresh - offset
                break
        else:
            raise Indeterminate(
                f"pi_point error exceeds 1% of threshold {thresh:.3g}"
            )
    passed = slack_i > 0.0 and slack_ii > 0.0 and slack_iii > 0.0
    return PairReport(passed, slack_i, slack_ii, slack_iii)


def _verify_all(ifs, cert):
    """Re-run the checker over every pair; abort on any failure."""
    for u, v in cert.pairs():
        rep = check_relclose(ifs, u, v, cert.eps, cert.theta, cert.omega(u, v))
        cert.slacks[tuple(sorted((u, v)))] = rep
        if not rep.passed:
            raise VerificationFailed(
                f"pair ({word_str(u)}, {word_str(v)}) fails at eps={cert.eps}"
            )
    return cert


def _perp_direction(ifs, u, v, omega):
    """Angle perpendicular to the segment between the coded points of u.omega
    and v.omega; 0 when the segment degenerates."""
    pu, _ = ifs.pi_point(u, omega)
    pv, _ = ifs.pi_point(v, omega)
    dx, dy = pv[0] - pu[0], pv[1] - pu[1]
    if math.hypot(dx, dy) <= 1e-12 * max(ifs.D, 1.0):
        return 0.0
    return norm_angle(math.atan2(dy, dx) + 0.5 * math.pi)


def find_pair(ifs, eps, phi=None, budget=None):
    """Search for a distinct relatively-close pair plus its angle.

    Walks shrinking mass bands, buckets cylinders by discretized angle,
    orientation and log-size (cell width eps/2) and takes the first bucket
    collision in depth-first order.  Orientation is fixed with one reflecting
    symbol if needed; theta is perpendicular to the two coded tail points;
    the angle-target condition |phi(theta) - theta_u| < eps is met by
    appending copies of the small-rotation word a(eps/2) to both words.
    """
    from .rotation import sigma_arithmetic

    budget = budget or SearchBudget()
    sigma = sigma_arithmetic([-math.log(f.r) for f in ifs.maps], tol=1e-9)
    a = find_rotation_word(ifs, eps / 2.0)
    omega = TailWord((), a)
    width = eps / 2.0
    n_cells = max(1, math.ceil(TWO_PI / width))

    r = 1.0
    for _depth in range(1, budget.max_depth + 1):
        r *= ifs.r_min
        band = ifs.mass_band(r, cap=budget.max_band)
        buckets = {}
        collision = None
        for w in band:
            g = ifs.compose(w)
            key = (
                int(g.theta / width) % n_cells,
                g.orient,
                math.floor(g.log_r / width),
            )
            if key in buckets:
                collision = (buckets[key], w)
                break
            buckets[key] = w
        if collision is None:
            continue
        u, v = collision
        gu = ifs.compose(u)
        if gu.orient == -1:
            i0 = next(
                (i for i, f in enumerate(ifs.maps, start=1) if f.orient == -1), None
            )
            if i0 is None:
                raise NoReflectorAvailable("collision has orientation -1")
            u, v = u + (i0,), v + (i0,)
        theta = _perp_direction(ifs, u, v, omega)
        if phi is not None:
            target = phi(theta)
            ga = ifs.compose(a)
            net = epsilon_net(ga.theta, width, budget.p_max)
            for j in range(net.p + 1):
                du = circ_dist(ifs.compose(u).theta + j * ga.theta, target)
                dv = circ_dist(ifs.compose(v).theta + j * ga.theta, target)
                if du < eps and dv < eps:
                    u, v = u + a * j, v + a * j
                    break
            else:
                continue
        pair = tuple(sorted((u, v)))
        cert = RelCloseCertificate(
            words=(u, v),
            eps=eps,
            theta=theta,
            omegas={pair: omega},
            slacks={},
            provenance={
                "op": "find_pair",
                "eps": eps,
                "sigma": sigma,
                "a_word": word_str(a),
                "band_r": r,
            },
        )
        try:
            return _verify_all(ifs, cert)
        except VerificationFailed:
            continue
    raise BudgetExhausted(f"no colliding pair within depth {budget.max_depth}")


def _eps2_bounds(eps, eps1, r_umin):
    """The two smallness bounds on the inner closeness parameter used when
    doubling: a linear one scaled by the smallest family ratio, and the
    solution of (e^t - 1) + t = (eps/3) * r_umin."""
    b1 = min(math.exp(-eps / 6.0) * (eps / 3.0 - eps1) * r_umin, eps / 6.0)
    target = (eps / 3.0) * r_umin
    lo, hi = 0.0, target
    while (math.exp(hi) - 1.0) + hi < target:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (math.exp(mid) - 1.0) + mid < target:
            lo = mid
        else:
            hi = mid
    return b1, lo


def double_family(ifs, cert, eps, budget=None):
    """Turn a verified N-family at eps1 < eps/6 into a verified 2N-family at
    eps, by finding an inner pair (s, t) whose angles steer onto the family's
    direction and prefixing every family word with each of s and t."""
    eps1 = cert.eps
    if not (0.0 < eps1 < eps / 6.0):
        raise PreconditionViolated(f"need cert eps {eps1} < eps/6 = {eps / 6.0}")
    theta1 = cert.theta
    r_umin = min(math.exp(ifs.compose(w).log_r) for w in cert.words)
    b1, b2 = _eps2_bounds(eps, eps1, r_umin)
    eps2 = 0.9 * min(b1, b2)
    if eps2 <= 0.0:
        raise PreconditionViolated("eps2 underflow: family ratios too small")
    inner = find_pair(
        ifs, eps2, phi=lambda th: norm_angle(th - theta1), budget=budget
    )
    s, t = inner.words
    theta2 = inner.theta
    omega_inner = inner.omega(s, t)

    words = tuple(s + u for u in cert.words) + tuple(t + u for u in cert.words)
    omegas = {}
    n = len(cert.words)
    for i in range(n):
        for j in range(n):
            ui, uj = cert.words[i], cert.words[j]
            if i < j:
                om = cert.omega(ui, uj)
                omegas[tuple(sorted((s + ui, s + uj)))] = om
                omegas[tuple(sorted((t + ui, t + uj)))] = om
                omegas[tuple(sorted((s + ui, t + uj)))] = om
                omegas[tuple(sorted((s + uj, t + ui)))] = om
            elif i == j:
                omegas[tuple(sorted((s + ui, t + ui)))] = omega_inner
    out = RelCloseCertificate(
        words=words,
        eps=eps,
        theta=theta2,
        omegas=omegas,
        slacks={},
        provenance={
            "op": "double_family",
            "eps": eps,
            "eps1": eps1,
            "eps2": eps2,
            "eps2_bound_linear": b1,
            "eps2_bound_matrix": b2,
            "theta1": theta1,
            "theta2": theta2,
            "s": word_str(s),
            "t": word_str(t),
            "inner": inner.provenance,
            "base": cert.provenance,
        },
    )
    return _verify_all(ifs, out)


def grow_family(ifs, eps, size, budget=None):
    """Iterate doubling from a searched pair until the family has >= size
    words, all mutually relatively close at eps."""
    if size <= 2:
        return find_pair(ifs, eps, None, budget)
    sub = grow_family(ifs, 0.9 * eps / 6.0, (size + 1) // 2, budget)
    return double_family(ifs, sub, eps, budget)


def power_family(ifs, u, v, n, eps=1e-6):
    """The 2^n words made of n blocks from {u, v}, for non-rotating blocks of
    equal length; every pair is relatively close at numeric tolerance with the
    same tail u-bar and the direction perpendicular to the two coded points."""
    import itertools

    if u == v or len(u) != len(v):
        raise PreconditionViolated("need distinct u, v of equal length")
    gu, gv = ifs.compose(u), ifs.compose(v)
    if gu.orient != 1 or gv.orient != 1:
        raise PreconditionViolated("blocks must have orientation +1")
    if circ_dist(gu.theta, 0.0) > 1e-12 or circ_dist(gv.theta, 0.0) > 1e-12:
        raise PreconditionViolated("blocks must be non-rotating")
    if n < 1:
        raise PreconditionViolated("n >= 1 required")
    omega = TailWord((), u)
    theta = _perp_direction(ifs, u, v, omega)
    words = tuple(
        sum(blocks, ()) for blocks in itertools.product((u, v), repeat=n)
    )
    omegas = {tuple(sorted(p)): omega for p in itertools.combinations(words, 2)}
    cert = RelCloseCertificate(
        words=words,
        eps=eps,
        theta=theta,
        omegas=omegas,
        slacks={},
        provenance={
            "op": "power_family",
            "u": word_str(u),
            "v": word_str(v),
            "n": n,
            "eps": eps,
        },
    )
    return _verify_all(ifs, cert)
