"""Level covers, projected interval unions, Favard quadrature, the decay
schedule and bound curves.  The per-angle sweep is the hot path: cylinder
centers are built once per level as numpy arrays and each angle costs one
projection, one sort and one vectorized merge."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateFit,
    LevelTooLarge,
    NonHomogeneous,
    PreconditionViolated,
    RhoTooSmall,
)
from .ifs import DiskBody, HullBody

DEFAULT_INTERVAL_CAP = 2**24
RHO_CAP_LEVEL = 600  # r_min^level floor for the neighborhood sweep


@dataclass
class IntervalSet:
    los: np.ndarray
    his: np.ndarray

    @property
    def total_length(self):
        return float((self.his - self.los).sum())

    @property
    def intervals(self):
        return list(zip(self.los.tolist(), self.his.tolist()))

    def __len__(self):
        return len(self.los)


def merge_intervals(los, his):
    """Sort-and-sweep union of closed intervals; touching ones coalesce."""
    los = np.asarray(los, dtype=float)
    his = np.asarray(his, dtype=float)
    if len(los) == 0:
        return IntervalSet(los, his)
    order = np.argsort(los, kind="stable")
    lo, hi = los[order], his[order]
    cummax = np.maximum.accumulate(hi)
    new = np.empty(len(lo), dtype=bool)
    new[0] = True
    new[1:] = lo[1:] > cummax[:-1]
    idx = np.flatnonzero(new)
    starts = lo[idx]
    ends = np.empty(len(idx))
    ends[:-1] = cummax[idx[1:] - 1]
    ends[-1] = cummax[-1]
    return IntervalSet(starts, ends)


def cylinder_interval(geom, theta, body):
    """Projection interval of the cylinder image of the convex body."""
    return body.interval(geom, theta)


def default_workers():
    env = os.environ.get("FAVLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


class _LevelSweeper:
    """Incrementally maintained level-n cylinder data for one system."""

    def __init__(self, ifs, body=None, cap=DEFAULT_INTERVAL_CAP):
        self.ifs = ifs
        self.body = body or DiskBody(ifs.center, ifs.R0)
        self.cap = cap
        self.n = 0
        if isinstance(self.body, DiskBody):
            self._centers = np.array([self.body.center], dtype=float)
            self._ratios = np.ones(1)
        else:
            self._r = np.ones(1)
            self._theta = np.zeros(1)
            self._orient = np.ones(1)
            self._t = np.zeros((1, 2))

    def advance_to(self, n):
        if self.ifs.m**n > self.cap:
            raise LevelTooLarge(f"{self.ifs.m}^{n} intervals exceed cap {self.cap}")
        while self.n < n:
            self._step()
            self.n += 1

    def _step(self):
        ifs = self.ifs
        if isinstance(self.body, DiskBody):
            pts, rats = [], []
            for f in ifs.maps:
                m = f.matrix()
                pts.append(f.r * self._centers @ m.T + np.array([f.tx, f.ty]))
                rats.append(f.r * self._ratios)
            self._centers = np.vstack(pts)
            self._ratios = np.concatenate(rats)
        else:
            rs, ths, ors, ts = [], [], [], []
            for f in ifs.maps:
                m = f.matrix()
                rs.append(f.r * self._r)
                ths.append(f.theta + f.orient * self._theta)
                ors.append(f.orient * self._orient)
                ts.append(f.r * self._t @ m.T + np.array([f.tx, f.ty]))
            self._r = np.concatenate(rs)
            self._theta = np.concatenate(ths)
            self._orient = np.concatenate(ors)
            self._t = np.vstack(ts)

    def intervals_at(self, theta):
        if isinstance(self.body, DiskBody):
            proj = self._centers[:, 0] * math.cos(theta) + self._centers[:, 1] * math.sin(
                theta
            )
            half = self._ratios * self.body.radius
            return proj - half, proj + half
        verts = self.body.vertices
        psi = self._orient * (theta - self._theta)
        sup = np.cos(psi)[:, None] * verts[:, 0][None, :] + np.sin(psi)[:, None] * verts[
            :, 1
        ][None, :]
        mid = self._t[:, 0] * math.cos(theta) + self._t[:, 1] * math.sin(theta)
        return mid + self._r * sup.min(axis=1), mid + self._r * sup.max(axis=1)

    def length_at(self, theta):
        lo, hi = self.intervals_at(theta)
        return merge_intervals(lo, hi).total_length


def level_projection_length(ifs, n, theta, body=None, cap=DEFAULT_INTERVAL_CAP):
    """Total length and merged interval set of the projected level-n cover."""
    sweeper = _LevelSweeper(ifs, body=body, cap=cap)
    sweeper.advance_to(n)
    lo, hi = sweeper.intervals_at(theta)
    merged = merge_intervals(lo, hi)
    return merged.total_length, merged


def neighborhood_projection_length(ifs, rho, theta, body=None, cap=2_000_000):
    """Projected length of the rho-neighborhood estimate: mass-band cylinder
    intervals padded by rho, merged."""
    if not (0.0 < rho < 1.0):
        raise PreconditionViolated("rho in (0,1) required")
    if rho < ifs.r_min**RHO_CAP_LEVEL:
        raise RhoTooSmall(f"rho below r_min^{RHO_CAP_LEVEL}")
    body = body or DiskBody(ifs.center, ifs.R0)
    words = ifs.mass_band(rho, cap=cap)
    los, his = [], []
    for w in words:
        lo, hi = body.interval(ifs.compose(w), theta)
        los.append(lo - rho)
        his.append(hi + rho)
    return merge_intervals(np.array(los), np.array(his)).total_length


@dataclass
class FavardResult:
    n: int
    value: float
    max_over_theta: float
    thetas: np.ndarray
    lengths: np.ndarray


def projection_sweep(ifs, ns, thetas, body=None, workers=None, cap=DEFAULT_INTERVAL_CAP):
    """Per-theta lengths for each level in ns (ascending).  The result is a
    deterministic function of (ifs, ns, thetas) regardless of worker count."""
    ns = sorted(ns)
    thetas = list(thetas)
    workers = workers or default_workers()
    sweeper = _LevelSweeper(ifs, body=body, cap=cap)
    out = {}
    for n in ns:
        sweeper.advance_to(n)
        if workers > 1 and len(thetas) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                lengths = list(pool.map(sweeper.length_at, thetas))
        else:
            lengths = [sweeper.length_at(t) for t in thetas]
        out[n] = np.array(lengths)
    return out


def favard(ifs, n, K, body=None, workers=None, cap=DEFAULT_INTERVAL_CAP):
    """Midpoint-rule Favard integral of the level-n cover over K angles."""
    if K < 1:
        raise PreconditionViolated("K >= 1 required")
    thetas = [(j + 0.5) * math.pi / K for j in range(K)]
    lengths = projection_sweep(ifs, [n], thetas, body=body, workers=workers, cap=cap)[n]
    return FavardResult(
        n=n,
        value=float(lengths.sum() * math.pi / K),
        max_over_theta=float(lengths.max()),
        thetas=np.array(thetas),
        lengths=lengths,
    )


def log_star(x):
    """Number of natural-log iterations needed to bring x to <= 1."""
    if x <= 0.0:
        raise PreconditionViolated("x > 0 required")
    count = 0
    while x > 1.0:
        x = math.log(x)
        count += 1
    return count


@dataclass
class FavardSchedule:
    c1: float
    k: int
    d: float
    delta: float
    n: int
    m: int
    s_n: float
    log_L_n: float
    log_neg_log_rho: float
    B: float
    s_lower_bound: float  # log(-log rho_n) / (1 + log m)
    inequality_holds: bool


def bound_constant(k, d, m, delta):
    """Decay exponent log 2 / ((1+delta) k (d+1) log m)."""
    return math.log(2.0) / ((1.0 + delta) * k * (d + 1.0) * math.log(m))


def schedule(ifs, n, c1, k, d, delta):
    """Block-length schedule and derived log-space quantities for a
    homogeneous system."""
    rs = [f.r for f in ifs.maps]
    if max(rs) - min(rs) > 1e-12:
        raise NonHomogeneous("schedule requires a common contraction ratio")
    if min(c1, k, delta) <= 0 or d <= 0 or n < 1:
        raise PreconditionViolated("positive schedule parameters required")
    m = len(rs)
    r = rs[0]
    log_m = math.log(m)
    s_n = 2.0 * c1 * m ** ((d + 1.0) * k * n)
    log_L_n = s_n * log_m + 2.0 * math.log(s_n)
    log_neg_log_rho = log_L_n + math.log(-math.log(r))
    lower = log_neg_log_rho / (1.0 + log_m)
    return FavardSchedule(
        c1=c1,
        k=k,
        d=d,
        delta=delta,
        n=n,
        m=m,
        s_n=s_n,
        log_L_n=log_L_n,
        log_neg_log_rho=log_neg_log_rho,
        B=bound_constant(k, d, m, delta),
        s_lower_bound=lower,
        inequality_holds=s_n * (1.0 + log_m) >= log_neg_log_rho,
    )


def bound_curves(sched, c_low, C_ls, a_ls, grid, A=1.0):
    """Three reference curves over a grid of levels n: the 1/n lower bound,
    the iterated-log upper bound at rho = m^-n, and A/(log n)^B."""
    grid = list(grid)
    log_m = math.log(sched.m)
    lower = [c_low / n for n in grid]
    # log_*(m^n) = 1 + log_*(n log m) for n >= 1 without forming m^n
    ls = [C_ls * math.exp(-a_ls * (1 + log_star(n * log_m))) for n in grid]
    log_power = [
        A / math.log(n) ** sched.B if n > 1 else math.inf for n in grid
    ]
    return {"mattila": lower, "log_star": ls, "log_power": log_power}


@dataclass
class DecayFit:
    samples: tuple
    A_hat: float
    B_hat: float
    residual: float


def fit_decay(samples):
    """Least squares of log(length) on log(log n), samples with n >= 3."""
    pts = [(n, y) for n, y in samples if n >= 3]
    if len(pts) < 3:
        raise DegenerateFit("need >= 3 samples with n >= 3")
    if any(y <= 0 for _, y in pts):
        raise DegenerateFit("lengths must be positive")
    x = np.array([math.log(math.log(n)) for n, _ in pts])
    y = np.array([math.log(v) for _, v in pts])
    if np.ptp(x) == 0.0:
        raise DegenerateFit("zero variance in log log n")
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(((y - (slope * x + intercept)) ** 2).sum())
    return DecayFit(
        samples=tuple(pts),
        A_hat=float(math.exp(intercept)),
        B_hat=float(-slope),
        residual=resid,
    )
