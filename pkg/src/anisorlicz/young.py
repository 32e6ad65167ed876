"""Scalar and anisotropic Young functions.

Two representations live here:

* :class:`GFunction` -- an n-dimensional N-function ``Phi: R^n -> [0, inf)``
  with its gradient, either a weighted power sum ``sum a_i |v_i|^p_i`` or an
  arbitrary callable.
* :class:`ScalarFunction` -- a nondecreasing function on ``[0, inf)``
  vanishing at 0, either ``kappa * t**q`` or a sampled table with power-law
  extrapolation at both ends.

Everything is immutable.  Global properties (doubling, growth indices) are
only ever *sampled*, so verdicts are tri-state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "Verdict",
    "GFunction",
    "ScalarFunction",
    "GrowthIndices",
    "SamplePlan",
    "DoublingReport",
    "default_plan",
    "fit_end_exponents",
    "log_slope",
    "conjugate_scalar",
    "check_delta2_nabla2",
    "check_n_function",
    "growth_indices",
    "xi_bounds",
]


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


def combine(*verdicts):
    """FAIL dominates, then INCONCLUSIVE."""
    if any(v == Verdict.FAIL for v in verdicts):
        return Verdict.FAIL
    if any(v == Verdict.INCONCLUSIVE for v in verdicts):
        return Verdict.INCONCLUSIVE
    return Verdict.PASS


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SamplePlan:
    """Radii times unit directions at which sup/inf quantities are sampled."""

    radii: np.ndarray
    directions: np.ndarray

    @property
    def dim(self):
        return self.directions.shape[1]

    def points(self):
        """Array of shape ``(len(radii), len(directions), n)``."""
        return self.radii[:, None, None] * self.directions[None, :, :]


def default_plan(n, seed=0, r_min=1e-3, r_max=1e3, per_decade=10,
                 n_random=256, max_diagonals=256):
    """Log-uniform radii and axes + sign diagonals + random unit directions.

    Extremes of weighted-mean ratios of power sums sit on the axes; the
    random directions are there for callables with less structure.
    """
    decades = math.log10(r_max / r_min)
    radii = np.logspace(math.log10(r_min), math.log10(r_max),
                        int(round(decades * per_decade)) + 1)
    dirs = [np.eye(n), -np.eye(n)]
    n_diag = min(2 ** n, max_diagonals)
    signs = ((np.arange(n_diag)[:, None] >> np.arange(n)) & 1) * 2.0 - 1.0
    dirs.append(signs / math.sqrt(n))
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n_random, n))
    dirs.append(g / np.linalg.norm(g, axis=1, keepdims=True))
    return SamplePlan(radii=radii, directions=np.vstack(dirs))


# ---------------------------------------------------------------------------
# anisotropic G-functions
# ---------------------------------------------------------------------------


def _fd_gradient(func, v):
    # central differences, step 1e-5 * (1 + |v|)
    v = np.asarray(v, dtype=float)
    n = v.shape[-1]
    step = 1e-5 * (1.0 + np.linalg.norm(v, axis=-1))
    out = np.empty_like(v)
    for i in range(n):
        dv = np.zeros_like(v)
        dv[..., i] = step
        out[..., i] = (func(v + dv) - func(v - dv)) / (2.0 * step)
    return out


@dataclass(frozen=True, eq=False)
class GFunction:
    """An n-dimensional N-function and its gradient.

    Build one with :meth:`power_sum`, :meth:`from_callable` or
    :meth:`radial`.  Points are arrays whose last axis has length ``n``;
    every method broadcasts over the leading axes.
    """

    n: int
    exponents: Optional[tuple] = None
    coefficients: Optional[tuple] = None
    func: Optional[Callable] = None
    grad: Optional[Callable] = None
    name: str = ""

    @classmethod
    def power_sum(cls, exponents, coefficients=None):
        p = tuple(float(x) for x in exponents)
        if len(p) < 2:
            raise ValueError("need at least two exponents (n >= 2)")
        if any(not (x > 1.0) or not math.isfinite(x) for x in p):
            raise ValueError(f"exponents must be finite and > 1, got {p}")
        a = (1.0,) * len(p) if coefficients is None else tuple(float(x) for x in coefficients)
        if len(a) != len(p):
            raise ValueError("exponents and coefficients differ in length")
        if any(not (x > 0.0) for x in a):
            raise ValueError(f"coefficients must be > 0, got {a}")
        label = "+".join(f"{c:g}|v{i + 1}|^{q:g}" for i, (c, q) in enumerate(zip(a, p)))
        return cls(n=len(p), exponents=p, coefficients=a, name=label)

    @classmethod
    def from_callable(cls, n, func, grad=None, name="callable"):
        if n < 2:
            raise ValueError("dimension must be >= 2")
        return cls(n=int(n), func=func, grad=grad, name=name)

    @classmethod
    def radial(cls, profile: "ScalarFunction", n, name=None):
        """``v -> profile(|v|)``; this is how a scalar B is lifted to R^n."""

        def func(v):
            return profile(np.linalg.norm(v, axis=-1))

        def grad(v):
            r = np.linalg.norm(v, axis=-1)
            safe = np.where(r > 0, r, 1.0)
            scale = np.where(r > 0, profile.derivative(r) / safe, 0.0)
            return scale[..., None] * v

        return cls(n=int(n), func=func, grad=grad, name=name or f"radial({profile.name})")

    @property
    def kind(self):
        return "power_sum" if self.exponents is not None else "callable"

    def value(self, v):
        v = np.asarray(v, dtype=float)
        if self.exponents is not None:
            p = np.asarray(self.exponents)
            a = np.asarray(self.coefficients)
            return np.sum(a * np.abs(v) ** p, axis=-1)
        return np.asarray(self.func(v), dtype=float)

    __call__ = value

    def gradient(self, v):
        v = np.asarray(v, dtype=float)
        if self.exponents is not None:
            p = np.asarray(self.exponents)
            a = np.asarray(self.coefficients)
            return a * p * np.abs(v) ** (p - 1.0) * np.sign(v)
        if self.grad is not None:
            return np.asarray(self.grad(v), dtype=float)
        return _fd_gradient(self.value, v)

    def evaluate(self, v):
        """Return ``(Phi(v), grad Phi(v))``; rejects non-finite input."""
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.n:
            raise ValueError(f"expected last axis of length {self.n}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite input")
        return self.value(v), self.gradient(v)

    def euler_ratio(self, v):
        """``v . grad Phi(v) / Phi(v)``, the quantity behind the growth indices."""
        v = np.asarray(v, dtype=float)
        if self.exponents is not None:
            p = np.asarray(self.exponents)
            w = np.asarray(self.coefficients) * np.abs(v) ** p
            return np.sum(p * w, axis=-1) / np.sum(w, axis=-1)
        return np.sum(v * self.gradient(v), axis=-1) / self.value(v)


# ---------------------------------------------------------------------------
# scalar monotone functions
# ---------------------------------------------------------------------------


def log_slope(t, y):
    """Least-squares slope of ``log y`` against ``log t``."""
    lt = np.log(np.asarray(t, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lt, ly, 1)[0])


def fit_end_exponents(t, y, npts=10):
    """Power-law exponents fitted on the lowest and highest decade.

    Each fit uses up to ``npts`` table points spread over that decade.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = (t > 0) & (y > 0)
    t, y = t[ok], y[ok]
    if len(t) < 3:
        raise ValueError("table too short to fit endpoint exponents")

    def pick(mask):
        idx = np.flatnonzero(mask)
        if len(idx) < 2:
            idx = np.arange(len(t))[:2] if mask[0] else np.arange(len(t))[-2:]
        if len(idx) > npts:
            idx = idx[np.linspace(0, len(idx) - 1, npts).round().astype(int)]
        return log_slope(t[idx], y[idx])

    lo = pick(t <= t[0] * 10.0)
    hi = pick(t >= t[-1] / 10.0)
    return lo, hi


@dataclass(frozen=True, eq=False)
class ScalarFunction:
    """Nondecreasing ``M: [0, inf) -> [0, inf)`` with ``M(0) = 0``.

    ``kind == "power"``: ``M(t) = scale * t**exponent``.

    ``kind == "table"``: samples ``(t_k, y_k)`` joined log-log linearly
    (``interp="loglog"``) or as a right-continuous staircase
    (``interp="step"``), continued by ``y * (t/t_end)**exp`` outside.
    Negative arguments are folded with ``abs``.
    """

    kind: str
    exponent: float = float("nan")
    scale: float = 1.0
    t: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    lo_exp: Optional[float] = None
    hi_exp: Optional[float] = None
    interp: str = "loglog"
    name: str = ""

    # -- constructors -----------------------------------------------------

    @classmethod
    def power(cls, exponent, scale=1.0, name=None):
        q, k = float(exponent), float(scale)
        if not (q > 0) or not (k > 0):
            raise ValueError("power needs exponent > 0 and scale > 0")
        return cls(kind="power", exponent=q, scale=k, name=name or f"{k:g}*t^{q:g}")

    @classmethod
    def table(cls, t, y, lo_exp="fit", hi_exp="fit", interp="loglog", name="table"):
        t = np.array(t, dtype=float)
        y = np.array(y, dtype=float)
        if t.ndim != 1 or t.shape != y.shape or len(t) < 2:
            raise ValueError("table needs matching 1-d abscissae and values")
        if np.any(np.diff(t) <= 0) or t[0] < 0:
            raise ValueError("abscissae must be nonnegative and strictly increasing")
        if np.any(np.diff(y) < 0) or y[0] < 0:
            raise ValueError("values must be nonnegative and nondecreasing")
        if t[0] == 0 and y[0] != 0:
            raise ValueError("value at 0 must be 0")
        if interp not in ("loglog", "step"):
            raise ValueError(f"unknown interpolation {interp!r}")
        if lo_exp == "fit" or hi_exp == "fit":
            try:
                flo, fhi = fit_end_exponents(t, y)
            except ValueError:
                flo = fhi = None
            lo_exp = flo if lo_exp == "fit" else lo_exp
            hi_exp = fhi if hi_exp == "fit" else hi_exp
        t.setflags(write=False)
        y.setflags(write=False)
        return cls(kind="table", t=t, y=y, lo_exp=lo_exp, hi_exp=hi_exp,
                   interp=interp, name=name)

    @classmethod
    def sample(cls, func, t, name="sampled"):
        t = np.asarray(t, dtype=float)
        return cls.table(t, func(t), name=name)

    # -- evaluation -------------------------------------------------------

    def _lo_value(self, t):
        t0, y0 = self.t[0], self.y[0]
        if t0 == 0 or self.lo_exp is None:
            return np.zeros_like(t) if t0 == 0 else np.full_like(t, 0.0)
        return y0 * (t / t0) ** self.lo_exp

    def _hi_value(self, t):
        if self.hi_exp is None:
            raise ValueError(f"argument above table range [.., {self.t[-1]:g}] "
                             "and no extrapolation exponent")
        return self.y[-1] * (t / self.t[-1]) ** self.hi_exp

    def value(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        if self.kind == "power":
            return self.scale * t ** self.exponent
        out = np.empty_like(t)
        tt, yy = self.t, self.y
        lo = t < tt[0]
        hi = t > tt[-1]
        mid = ~(lo | hi)
        if np.any(lo):
            out[lo] = self._lo_value(t[lo])
        if np.any(hi):
            out[hi] = self._hi_value(t[hi])
        if np.any(mid):
            x = t[mid]
            k = np.clip(np.searchsorted(tt, x, side="right") - 1, 0, len(tt) - 2)
            if self.interp == "step":
                out[mid] = np.where(x >= tt[k + 1], yy[k + 1], yy[k])
            else:
                t0, t1, y0, y1 = tt[k], tt[k + 1], yy[k], yy[k + 1]
                pos = (t0 > 0) & (y0 > 0) & (x > 0)
                with np.errstate(divide="ignore", invalid="ignore"):
                    w_log = np.log(np.where(pos, x / t0, 1.0)) / np.log(np.where(pos, t1 / t0, 2.0))
                    loglog = y0 * (y1 / np.where(y0 > 0, y0, 1.0)) ** w_log
                lin = y0 + (y1 - y0) * (x - t0) / (t1 - t0)
                out[mid] = np.where(pos, loglog, lin)
        return out

    def __call__(self, t):
        out = self.value(t)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t):
        """``M'(t)``; for tables the derivative of the log-log interpolant."""
        t = np.abs(np.asarray(t, dtype=float))
        if self.kind == "power":
            q = self.exponent
            if q == 1.0:
                return np.full_like(t, self.scale)
            with np.errstate(divide="ignore"):
                d = self.scale * q * t ** (q - 1.0)
            return np.where(t > 0, d, 0.0 if q > 1 else np.inf)
        slope = self.local_slope(t)
        val = self.value(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, slope * val / t, 0.0)

    def local_slope(self, t):
        """``t M'(t) / M(t)`` (the log-log slope)."""
        t = np.abs(np.asarray(t, dtype=float))
        if self.kind == "power":
            return np.full_like(t, self.exponent)
        tt, yy = self.t, self.y
        with np.errstate(divide="ignore", invalid="ignore"):
            seg = np.log(yy[1:] / yy[:-1]) / np.log(tt[1:] / tt[:-1])
        seg = np.where(np.isfinite(seg), seg, 0.0)
        k = np.clip(np.searchsorted(tt, t, side="right") - 1, 0, len(tt) - 2)
        out = seg[k]
        lo_e = self.lo_exp if self.lo_exp is not None else 0.0
        hi_e = self.hi_exp if self.hi_exp is not None else np.nan
        out = np.where(t < tt[0], lo_e, out)
        return np.where(t > tt[-1], hi_e, out)

    def inverse(self, y):
        """Left-continuous inverse: the least ``t`` with ``M(t) >= y``."""
        y = np.asarray(y, dtype=float)
        if np.any(y < 0):
            raise ValueError("inverse needs y >= 0")
        if self.kind == "power":
            out = (y / self.scale) ** (1.0 / self.exponent)
            return float(out) if out.ndim == 0 else out
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        tt, yy = self.t, self.y
        out = np.empty_like(y)
        hi = y > yy[-1]
        if np.any(hi):
            if self.hi_exp is None:
                raise ValueError(f"y={y[hi].max():g} above table range and no extrapolation exponent")
            out[hi] = tt[-1] * (y[hi] / yy[-1]) ** (1.0 / self.hi_exp)
        lo = (y <= yy[0]) & ~hi
        if np.any(lo):
            if tt[0] == 0 or yy[0] == 0 or self.lo_exp is None:
                out[lo] = np.where(y[lo] <= 0, 0.0, tt[0])
            else:
                out[lo] = tt[0] * (y[lo] / yy[0]) ** (1.0 / self.lo_exp)
        mid = ~(lo | hi)
        if np.any(mid):
            x = y[mid]
            k = np.searchsorted(yy, x, side="left")  # first node with yy[k] >= x
            exact = yy[k] == x
            if self.interp == "step":
                res = tt[k]
            else:
                t0, t1, y0, y1 = tt[k - 1], tt[k], yy[k - 1], yy[k]
                pos = (t0 > 0) & (y0 > 0)
                with np.errstate(divide="ignore", invalid="ignore"):
                    w = np.log(x / np.where(pos, y0, 1.0)) / np.log(y1 / np.where(pos, y0, 1.0))
                    loglog = t0 * (t1 / np.where(pos, t0, 1.0)) ** w
                lin = t0 + (t1 - t0) * (x - y0) / (y1 - y0)
                res = np.where(pos, loglog, lin)
                res = np.where(exact, tt[k], res)
            out[mid] = res
        return float(out[0]) if scalar else out

    @property
    def end_exponents(self):
        if self.kind == "power":
            return self.exponent, self.exponent
        return self.lo_exp, self.hi_exp


@dataclass(frozen=True)
class GrowthIndices:
    """Lower and upper growth exponents ``(i, s)``."""

    i: float
    s: float

    @property
    def bounded(self):
        return math.isfinite(self.s)

    def is_n_function_range(self):
        return 1.0 < self.i <= self.s < math.inf


def xi_bounds(idx: GrowthIndices, t):
    """``(min(t^i, t^s), max(t^i, t^s))``."""
    t = float(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    a, b = t ** idx.i, t ** idx.s
    return min(a, b), max(a, b)


# ---------------------------------------------------------------------------
# conjugates
# ---------------------------------------------------------------------------


def conjugate_scalar(M: ScalarFunction, points=241):
    """Complementary function ``M~(s) = sup_t (s t - M(t))``.

    Powers are handled in closed form; tables are transformed pointwise by
    a discrete argmax refined with a bounded scalar search.
    """
    lo, hi = M.end_exponents
    if hi is None or lo is None or not (hi > 1.0) or not (lo > 1.0):
        raise ValueError(f"{M.name}: not an N-function (end exponents {lo}, {hi}); "
                         "the conjugate degenerates")
    if M.kind == "power":
        q, k = M.exponent, M.scale
        qc = q / (q - 1.0)
        return ScalarFunction.power(qc, (1.0 / qc) * (k * q) ** (-(qc - 1.0)),
                                    name=f"conj({M.name})")
    t_lo, t_hi = M.t[M.t > 0][0], M.t[-1]
    s_lo, s_hi = float(M.derivative(t_lo)), float(M.derivative(t_hi))
    s = np.geomspace(s_lo, s_hi, points)
    # dense search grid two decades wider than the table on each side
    tg = np.geomspace(t_lo / 100.0, t_hi * 100.0, 4000)
    Mg = M.value(tg)
    vals = np.empty_like(s)
    for j, sj in enumerate(s):
        k = int(np.argmax(sj * tg - Mg))
        a, b = tg[max(k - 1, 0)], tg[min(k + 1, len(tg) - 1)]
        res = minimize_scalar(lambda x: -(sj * x - float(M.value(x))), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-12 * b})
        vals[j] = max(-res.fun, sj * tg[k] - Mg[k])
    return ScalarFunction.table(s, vals, lo_exp=lo / (lo - 1.0), hi_exp=hi / (hi - 1.0),
                                name=f"conj({M.name})")


# ---------------------------------------------------------------------------
# sampled diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DoublingReport:
    K1: float
    K2: float
    K1_point: np.ndarray
    K2_point: np.ndarray
    delta2: Verdict
    nabla2: Verdict

    @property
    def verdict(self):
        return combine(self.delta2, self.nabla2)

    def as_dict(self):
        return {
            "verdict": str(self.verdict),
            "delta2": str(self.delta2),
            "nabla2": str(self.nabla2),
            "K1_est": self.K1,
            "K2_est": self.K2,
            "K1_point": self.K1_point.tolist(),
            "K2_point": self.K2_point.tolist(),
        }


def _trend_per_decade(radii, series):
    """Relative change of ``series`` over the last sampled decade."""
    last = radii >= radii[-1] / 10.0
    first = int(np.flatnonzero(last)[0])
    a, b = series[first], series[-1]
    return (b - a) / abs(a) if a != 0 else np.inf


def check_delta2_nabla2(phi: GFunction, plan: Optional[SamplePlan] = None,
                        tol=1e-3):
    """Sampled two-sided doubling constants ``K1 Phi(v) <= Phi(2v) <= K2 Phi(v)``.

    Delta_2 fails when the ratio is non-finite or still climbing by 10% or
    more per decade at the largest sampled radius.  The lower side is
    judged against 2, the value every convex function vanishing at 0
    already attains.
    """
    plan = plan or default_plan(phi.n)
    pts = plan.points()
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ratio = phi.value(2.0 * pts) / phi.value(pts)
    finite = np.isfinite(ratio)
    r_all = np.where(finite, ratio, np.inf)
    i2 = np.unravel_index(int(np.argmax(r_all)), r_all.shape)
    i1 = np.unravel_index(int(np.argmin(np.where(finite, ratio, np.inf))), ratio.shape)
    K2 = float(r_all[i2])
    K1 = float(ratio[i1]) if np.any(finite) else float("nan")

    if not np.all(finite):
        delta2 = Verdict.FAIL
    else:
        col = ratio[:, i2[1]]
        growth = _trend_per_decade(plan.radii, col)
        at_edge = i2[0] == len(plan.radii) - 1
        if at_edge and growth >= 0.1:
            delta2 = Verdict.FAIL
        elif at_edge and growth > tol:
            delta2 = Verdict.INCONCLUSIVE
        else:
            delta2 = Verdict.PASS

    if not math.isfinite(K1) or K1 <= 2.0 + 1e-9:
        nabla2 = Verdict.FAIL
    elif K1 <= 2.0 + tol or (i1[0] in (0, len(plan.radii) - 1)
                             and _trend_per_decade(plan.radii, ratio[:, i1[1]]) < -tol):
        nabla2 = Verdict.INCONCLUSIVE
    else:
        nabla2 = Verdict.PASS
    return DoublingReport(K1=K1, K2=K2, K1_point=pts[i1], K2_point=pts[i2],
                          delta2=delta2, nabla2=nabla2)


def check_n_function(phi: GFunction, plan: Optional[SamplePlan] = None, seed=0, pairs=2000):
    """Sampled refutation of the N-function axioms; returns failure messages."""
    plan = plan or default_plan(phi.n, seed=seed)
    problems = []
    if abs(float(phi.value(np.zeros(phi.n)))) != 0.0:
        problems.append("Phi(0) != 0")
    pts = plan.points().reshape(-1, phi.n)
    val = phi.value(pts)
    if not np.all(val > 0):
        problems.append("Phi vanishes away from 0")
    if not np.allclose(phi.value(-pts), val, rtol=1e-12, atol=0):
        problems.append("Phi is not even")
    rng = np.random.default_rng(seed)
    x = pts[rng.integers(len(pts), size=pairs)]
    y = pts[rng.integers(len(pts), size=pairs)]
    mid = phi.value(0.5 * (x + y))
    if np.any(mid > 0.5 * (phi.value(x) + phi.value(y)) * (1 + 1e-12)):
        problems.append("midpoint convexity violated")
    ray = val.reshape(len(plan.radii), -1) / plan.radii[:, None]
    if np.any(ray[-1] <= ray[len(plan.radii) // 2]):
        problems.append("Phi(v)/|v| not growing along some ray")
    return problems


def _round_outward(i, s, step=1e-3):
    # snap values that are already on the grid to absorb last-bit noise
    lo = math.floor(i / step + 1e-6) * step
    hi = math.ceil(s / step - 1e-6) * step if math.isfinite(s) else s
    return round(lo, 12), (round(hi, 12) if math.isfinite(hi) else hi)


def growth_indices(G, plan: Optional[SamplePlan] = None, cap=1e3):
    """Growth indices ``inf`` / ``sup`` of ``v.gradG(v)/G(v)`` (or ``tG'(t)/G(t)``).

    Values are rounded outward to a 1e-3 grid, so strict comparisons such
    as ``theta > s`` made downstream are conservative.  ``s`` is reported
    as ``inf`` when the sampled supremum exceeds ``cap``.
    """
    if isinstance(G, ScalarFunction):
        if G.kind == "power":
            i = s = G.exponent
        else:
            t = plan.radii if plan is not None else np.geomspace(1e-3, 1e3, 61)
            nodes = np.concatenate([t, G.t[G.t > 0]])
            ratio = G.local_slope(nodes)
            ends = [e for e in G.end_exponents if e is not None]
            i = float(min(ratio.min(), *ends))
            s = float(max(ratio.max(), *ends))
    else:
        plan = plan or default_plan(G.n)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            ratio = G.euler_ratio(plan.points())
        ratio = np.where(np.isfinite(ratio), ratio, np.inf)
        i, s = float(ratio.min()), float(ratio.max())
    if s > cap:
        s = math.inf
    return GrowthIndices(*_round_outward(float(i), float(s)))
