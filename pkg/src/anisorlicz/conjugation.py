"""Sobolev conjugate ``Phi_n = phi_circ o H^{-1}`` and the growth relations.

``H(s) = (int_0^s (t / phi_circ(t))^{1/(n-1)} dt)^{(n-1)/n}``.  The
integrand is singular at 0; below the first table node it is a pure power
(the fitted lower end exponent) and is integrated in closed form, likewise
beyond the last node.  Between nodes adaptive quadrature is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .young import (GFunction, SamplePlan, ScalarFunction, Verdict, default_plan,
                    log_slope)

__all__ = [
    "IntegrabilityReport",
    "DominationVerdict",
    "ConjugateExponent",
    "HFunction",
    "check_integrability",
    "compute_H",
    "compute_phi_n",
    "check_dominates",
    "equivalent",
    "check_phi2",
    "power_sum_conjugate_exponent",
]

# fitted end exponents this close to n are treated as undecidable
_BORDER_TOL = 1e-3


def _power_integral(c, beta, a, b):
    """``int_a^b c t^beta dt`` (``a`` may be 0 when ``beta > -1``)."""
    if beta == -1.0:
        return c * (math.log(b) - math.log(a))
    return c * (b ** (beta + 1.0) - a ** (beta + 1.0)) / (beta + 1.0)


class HFunction:
    """Cumulative-integral evaluator for ``H`` given ``phi_circ`` and ``n``.

    Node integrals are computed once; ``H(s)`` then costs one partial
    segment.  Use :func:`compute_H` for one-off values.
    """

    def __init__(self, phi_circ: ScalarFunction, n):
        if n < 2:
            raise ValueError("n must be >= 2")
        self.phi_circ = phi_circ
        self.n = int(n)
        self.expo = 1.0 / (n - 1.0)
        q0, _ = phi_circ.end_exponents
        if q0 is None or not (q0 < n):
            raise ValueError(f"integral at 0 diverges (lower exponent {q0}, n={n})")
        if phi_circ.kind == "table":
            tt = phi_circ.t[phi_circ.t > 0]
            self.nodes = tt
            head = self._tail_coeffs(tt[0], float(phi_circ(tt[0])), q0)
            self.head = _power_integral(*head, 0.0, tt[0])
            segs = [quad(self.integrand, a, b, limit=200, epsrel=1e-12, epsabs=0.0)[0]
                    for a, b in zip(tt[:-1], tt[1:])]
            self.cum = np.concatenate([[self.head], self.head + np.cumsum(segs)])
        else:
            self.nodes = None

    def _tail_coeffs(self, t_ref, y_ref, q):
        # integrand c t^beta matching phi_circ = y_ref (t/t_ref)^q
        beta = (1.0 - q) * self.expo
        c = (t_ref ** q / y_ref) ** self.expo
        return c, beta

    def integrand(self, t):
        return (t / self.phi_circ(t)) ** self.expo

    def integral(self, s):
        s = float(s)
        if s < 0:
            raise ValueError("s must be >= 0")
        if s == 0.0:
            return 0.0
        pc = self.phi_circ
        if pc.kind == "power":
            c, beta = self._tail_coeffs(1.0, pc.scale, pc.exponent)
            return _power_integral(c, beta, 0.0, s)
        tt = self.nodes
        if s <= tt[0]:
            c, beta = self._tail_coeffs(tt[0], float(pc(tt[0])), pc.lo_exp)
            return _power_integral(c, beta, 0.0, s)
        if s >= tt[-1]:
            if s == tt[-1]:
                return float(self.cum[-1])
            if pc.hi_exp is None:
                raise ValueError("s beyond table and no upper extrapolation exponent")
            c, beta = self._tail_coeffs(tt[-1], float(pc(tt[-1])), pc.hi_exp)
            return float(self.cum[-1]) + _power_integral(c, beta, tt[-1], s)
        k = int(np.searchsorted(tt, s, side="right") - 1)
        part = quad(self.integrand, tt[k], s, limit=200, epsrel=1e-12, epsabs=0.0)[0]
        return float(self.cum[k]) + part

    def __call__(self, s):
        return self.integral(s) ** ((self.n - 1.0) / self.n)


def compute_H(phi_circ: ScalarFunction, n, s):
    """``H(s)`` for a single ``s``."""
    return HFunction(phi_circ, n)(s)


@dataclass(frozen=True)
class IntegrabilityReport:
    phi0: Verdict
    phi0_value: Optional[float]
    q0: float
    phi1: Verdict
    q_inf: float

    def as_dict(self):
        return {"phi0": str(self.phi0), "phi0_value": self.phi0_value,
                "q0": self.q0, "phi1": str(self.phi1), "q_inf": self.q_inf}


def check_integrability(phi_circ: ScalarFunction, n) -> IntegrabilityReport:
    """Decide convergence of ``int_0`` and divergence of ``int^inf`` of ``(t/phi_circ)^{1/(n-1)}``.

    Exponent arithmetic on the end powers: the integrand behaves like
    ``t^{(1-q)/(n-1)}``, integrable at 0 iff ``q0 < n`` and divergent at
    infinity iff ``q_inf <= n``.  Exact powers are decided exactly, fitted
    table exponents within 1e-3 of ``n`` are left inconclusive.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    q0, qinf = phi_circ.end_exponents
    if q0 is None or qinf is None:
        raise ValueError("table too short to fit endpoint exponents")
    tol = 0.0 if phi_circ.kind == "power" else _BORDER_TOL
    if abs(q0 - n) <= tol and tol > 0:
        phi0 = Verdict.INCONCLUSIVE
    else:
        phi0 = Verdict.PASS if q0 < n else Verdict.FAIL
    if abs(qinf - n) <= tol and tol > 0:
        phi1 = Verdict.INCONCLUSIVE
    else:
        phi1 = Verdict.PASS if qinf <= n else Verdict.FAIL
    value = HFunction(phi_circ, n).integral(1.0) if phi0 == Verdict.PASS else None
    return IntegrabilityReport(phi0, value, float(q0), phi1, float(qinf))


def compute_phi_n(phi_circ: ScalarFunction, n, r_range=(1e-3, 1e3), points=301,
                  check=True):
    """Tabulate ``Phi_n = phi_circ o H^{-1}`` so that it covers ``r_range``.

    Nodes are ``(H(s_j), phi_circ(s_j))`` on a log grid of ``s`` wide
    enough that ``H`` spans the requested range.  Only the case where
    ``Phi_n`` is finite everywhere is built.
    """
    if check:
        rep = check_integrability(phi_circ, n)
        if rep.phi0 != Verdict.PASS:
            raise ValueError(f"(Phi_0) is {rep.phi0}: H is not defined")
        if rep.phi1 != Verdict.PASS:
            raise ValueError(f"(Phi_1) is {rep.phi1}: Phi_n is infinite for large t "
                             "(L-infinity case, not built)")
    H = HFunction(phi_circ, n)
    r_lo, r_hi = r_range
    s_lo, s_hi = 1.0, 1.0
    for _ in range(400):
        if H(s_lo) <= r_lo:
            break
        s_lo /= 10.0
    else:
        raise ValueError("H does not reach the lower end of r_range")
    for _ in range(400):
        if H(s_hi) >= r_hi:
            break
        s_hi *= 10.0
    else:
        raise ValueError("H does not reach the upper end of r_range")
    s = np.geomspace(s_lo, s_hi, points)
    hs = np.array([H(x) for x in s])
    ys = phi_circ.value(s)
    keep = np.concatenate([[True], np.diff(hs) > 0])
    return ScalarFunction.table(hs[keep], ys[keep], name=f"Phi_n[{phi_circ.name}]")


# ---------------------------------------------------------------------------
# growth relations
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DominationVerdict:
    """Outcome of ``A << B`` (``A(v) <= B(C|v|)`` for large ``v``)."""

    relation: str
    C_est: Optional[float]
    threshold: Optional[float]
    witness: Optional[np.ndarray]
    slope_a: float
    slope_b: float

    def as_dict(self):
        return {
            "relation": self.relation,
            "C_est": self.C_est,
            "threshold": self.threshold,
            "witness": None if self.witness is None else np.atleast_1d(self.witness).tolist(),
            "slope_a": self.slope_a,
            "slope_b": self.slope_b,
        }


def _directions_for(A, plan):
    if isinstance(A, ScalarFunction):
        return np.ones((1, 1))
    return plan.directions


def _eval_a(A, radii, dirs):
    if isinstance(A, ScalarFunction):
        return A.value(radii)[:, None]
    return A.value(radii[:, None, None] * dirs[None, :, :])


def check_dominates(A, B: ScalarFunction, plan: Optional[SamplePlan] = None,
                    strict_equal=False, slope_tol=5e-3):
    """Sampled test of ``A << B`` with ``B`` lifted radially.

    ``fails`` when, along some direction, the tail log-log slope of ``A``
    exceeds that of ``B``.  ``dominates`` when some ``C`` in ``2^-4..2^10``
    and threshold ``r0`` give ``A(v) <= B(C|v|)`` at every sampled
    ``|v| >= r0`` and the tail slopes leave room.  Equal tail slopes are
    accepted only if the ratio ``A/B(C.)`` is not creeping up, and never
    when ``strict_equal`` is set.
    """
    n = 1 if isinstance(A, ScalarFunction) else A.n
    plan = plan or default_plan(max(n, 2))
    radii = plan.radii
    dirs = _directions_for(A, plan)
    tail = radii >= radii[-1] / 10.0
    prev = (radii >= radii[-1] / 100.0) & (radii <= radii[-1] / 10.0)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        a_val = _eval_a(A, radii, dirs)  # (R, D)
        la = np.log(a_val)
    lr = np.log(radii)
    slopes_a = np.polyfit(lr[tail], la[tail], 1)[0]
    prev_a = np.polyfit(lr[prev], la[prev], 1)[0]
    k_dir = int(np.argmax(slopes_a))
    slope_a = float(slopes_a[k_dir])
    slope_b = log_slope(radii[tail], B.value(radii[tail]))
    gap = slope_a - slope_b
    gap_prev = float(prev_a[k_dir]) - log_slope(radii[prev], B.value(radii[prev]))
    tol = slope_tol * max(1.0, abs(slope_b))
    # a lower-order correction shrinks the slope gap geometrically per decade
    closing = abs(gap) <= 0.5 * abs(gap_prev) and np.sign(gap) == np.sign(gap_prev)

    if gap > tol and not closing:
        C_max = 2.0 ** 10
        ca = la[-1, k_dir] - slope_a * lr[-1]
        cb = math.log(float(B(radii[-1]))) - slope_b * lr[-1]
        lr_star = (cb + slope_b * math.log(C_max) - ca) / gap
        r_star = math.exp(min(max(lr[-1], lr_star) + 1.0, 690.0))
        w = r_star * dirs[k_dir]
        return DominationVerdict("fails", None, None, w if n > 1 else np.array([r_star]),
                                 slope_a, slope_b)

    for C in 2.0 ** np.arange(-4, 11):
        with np.errstate(over="ignore"):
            b_val = B.value(C * radii)[:, None]
        ok_rows = np.all(a_val <= b_val, axis=1)
        # largest suffix of radii on which domination holds
        bad = np.flatnonzero(~ok_rows)
        start = 0 if len(bad) == 0 else bad[-1] + 1
        if start >= len(radii) or radii[start] > radii[-1] / 10.0:
            continue
        verdict = DominationVerdict("dominates", float(C), float(radii[start]), None,
                                    slope_a, slope_b)
        if gap < -tol:
            return verdict
        if strict_equal and abs(gap) <= tol:
            break
        if closing:
            return verdict
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.max(a_val[tail] / b_val[tail], axis=1)
        if ratio[-1] <= ratio[0] * (1.0 + 1e-6):
            return verdict
        break
    return DominationVerdict("inconclusive", None, None, None, slope_a, slope_b)


def equivalent(A: ScalarFunction, B: ScalarFunction, plan: Optional[SamplePlan] = None):
    """``A ~ B``: domination in both directions."""
    ab = check_dominates(A, B, plan)
    ba = check_dominates(B, A, plan)
    if ab.relation == "dominates" and ba.relation == "dominates":
        return Verdict.PASS, ab, ba
    if "fails" in (ab.relation, ba.relation):
        return Verdict.FAIL, ab, ba
    return Verdict.INCONCLUSIVE, ab, ba


def check_phi2(phi: GFunction, phi_n: ScalarFunction, plan: Optional[SamplePlan] = None):
    """``Phi << Phi_n(|.|)``; equal tail slopes are undecidable and stay inconclusive."""
    d = check_dominates(phi, phi_n, plan, strict_equal=True)
    verdict = {"dominates": Verdict.PASS, "fails": Verdict.FAIL}.get(d.relation,
                                                                    Verdict.INCONCLUSIVE)
    return verdict, d


# ---------------------------------------------------------------------------
# power sums in closed form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConjugateExponent:
    """Harmonic mean ``p_bar`` and ``p_bar* = n p_bar / (n - p_bar)`` (``None`` when infinite)."""

    p_bar: Fraction
    p_star: Optional[Fraction]

    @property
    def finite(self):
        return self.p_star is not None


def _as_fraction(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return Fraction(str(x))


def power_sum_conjugate_exponent(p, n) -> ConjugateExponent:
    """Exact rational ``p_bar`` and ``p_bar*`` of a power sum.

    >>> power_sum_conjugate_exponent([2, 2, 7], 3).p_star
    Fraction(21, 1)
    """
    if len(p) != n:
        raise ValueError(f"expected {n} exponents, got {len(p)}")
    fr = [_as_fraction(x) for x in p]
    if any(x <= 1 for x in fr):
        raise ValueError("exponents must be > 1")
    p_bar = Fraction(n) / sum(1 / x for x in fr)
    if p_bar >= n:
        return ConjugateExponent(p_bar, None)
    return ConjugateExponent(p_bar, n * p_bar / (n - p_bar))
