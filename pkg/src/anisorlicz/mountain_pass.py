"""Energy functional, hypothesis audit and a discrete mountain-pass solver.

The energy of a grid field is

    J(u) = sum [ Phi(D u) + V N(|u|) - F(u) ] h^n

with ``D`` the forward-difference gradient of :mod:`anisorlicz.spaces`.
Its derivative is represented by the residual field ``g`` with
``<g, v> h^n = J'(u) v`` for every grid field ``v``.

The solver searches along rays: for a direction ``u`` the path
``s -> s T u`` runs from 0 to a valley point ``T u`` with negative energy,
and its highest point is the ray maximum ``t* u``.  Each iteration moves
the highest point down the Sobolev gradient ``(D^T D + I)^{-1} g`` and
re-lifts it to the top of its new ray, so the highest path energy never
increases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy import ndimage
from scipy.optimize import minimize_scalar

from . import conjugation as cj
from .rearrangement import compute_phi_circ, phi_circ_power
from .spaces import (
    DomainSpec,
    Field,
    bump,
    div_adjoint_array,
    grad_array,
    luxemburg_norm,
    modular,
)
from .young import (
    GFunction,
    ScalarFunction,
    Verdict,
    check_delta2_nabla2,
    combine,
    conjugate_scalar,
    growth_indices,
)

__all__ = [
    "Potential",
    "Nonlinearity",
    "ProblemSpec",
    "MPOptions",
    "MPResult",
    "HypothesisReport",
    "default_problem",
    "audit_assumptions",
    "energy",
    "energy_gradient",
    "riesz_map",
    "dual_norm",
    "valley_scale",
    "find_valley_point",
    "ray_maximum",
    "mountain_pass_solve",
    "ps_monitor",
    "concentration_functional",
    "recenter",
    "solve_report",
]


# ---------------------------------------------------------------------------
# problem data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Potential:
    """``V(x)`` evaluated on arrays of points ``(..., n)`` with a lattice period."""

    func: Callable
    period: tuple
    name: str = "V"
    params: dict = field(default_factory=dict)

    @classmethod
    def constant(cls, n, c=1.0, period=1.0):
        c = float(c)
        return cls(lambda x: np.full(np.shape(x)[:-1], c), (float(period),) * n,
                   name=f"const({c:g})", params={"kind": "constant", "value": c,
                                                 "period": float(period)})

    @classmethod
    def cosine_product(cls, n, base=1.0, amplitude=0.5, period=1.0):
        """``base + amplitude * prod cos(2 pi x_i / period)``."""
        base, amplitude, period = float(base), float(amplitude), float(period)

        def func(x):
            return base + amplitude * np.prod(np.cos(2.0 * np.pi * np.asarray(x) / period), axis=-1)

        return cls(func, (period,) * n, name=f"{base:g}+{amplitude:g}*prod cos",
                   params={"kind": "cosine_product", "value": base, "amplitude": amplitude,
                           "period": period})

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """Reaction term ``f`` with antiderivative ``F`` (``F(0) = 0``)."""

    f: Callable
    F: Callable
    name: str = "f"
    params: dict = field(default_factory=dict)

    @classmethod
    def power(cls, q, coefficient=1.0):
        """``f(t) = c |t|^(q-2) t``, ``F(t) = c |t|^q / q``."""
        q, c = float(q), float(coefficient)
        if q <= 1:
            raise ValueError("power nonlinearity needs q > 1")

        def f(t):
            t = np.asarray(t, dtype=float)
            return c * np.abs(t) ** (q - 1.0) * np.sign(t)

        def F(t):
            return c * np.abs(np.asarray(t, dtype=float)) ** q / q

        return cls(f, F, name=f"{c:g}|t|^{q - 2:g}t",
                   params={"kind": "power", "exponent": q, "coefficient": c})

    @classmethod
    def zero(cls):
        return cls(lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                   lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                   name="0", params={"kind": "zero"})

    def validate(self, rtol=1e-5):
        """Reject ``f(0) != 0`` or ``F(0) != 0`` and check ``F' = f`` by central differences."""
        if float(self.f(0.0)) != 0.0 or float(self.F(0.0)) != 0.0:
            raise ValueError("nonlinearity must satisfy f(0) = 0 and F(0) = 0")
        t = np.concatenate([-np.geomspace(1e-2, 1e1, 16), np.geomspace(1e-2, 1e1, 16)])
        h = 1e-6 * (1.0 + np.abs(t))
        fd = (self.F(t + h) - self.F(t - h)) / (2.0 * h)
        ft = self.f(t)
        bad = np.abs(fd - ft) > rtol * (np.abs(ft) + 1e-8)
        if np.any(bad):
            raise ValueError(f"F' != f near t={t[bad][0]:g}")


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    phi: GFunction
    N: ScalarFunction
    V: Potential
    f: Nonlinearity
    theta: float
    domain: DomainSpec
    seed: int = 0

    def __post_init__(self):
        if self.phi.n != self.domain.n:
            raise ValueError("Phi dimension does not match the domain")
        if len(self.V.period) != self.domain.n:
            raise ValueError("potential period has the wrong dimension")

    def with_domain(self, domain):
        return ProblemSpec(self.phi, self.N, self.V, self.f, self.theta, domain, self.seed)


def default_problem(m=32, L=8.0, boundary="periodic"):
    """n=3, Phi = |v1|^1.8 + |v2|^2 + |v3|^2.2, N = t^pbar, f = t^3, V = 1."""
    p = (1.8, 2.0, 2.2)
    pbar = float(cj.power_sum_conjugate_exponent(p, 3).p_bar)
    return ProblemSpec(
        phi=GFunction.power_sum(p),
        N=ScalarFunction.power(pbar, name="t^pbar"),
        V=Potential.constant(3, 1.0),
        f=Nonlinearity.power(4.0),
        theta=4.0,
        domain=DomainSpec(3, L, m, boundary),
    )


# ---------------------------------------------------------------------------
# energy and derivative
# ---------------------------------------------------------------------------


def _v_grid(spec):
    return spec.V(spec.domain.coordinates())


def _vals(u):
    return u.values if isinstance(u, Field) else np.asarray(u, dtype=float)


def _energy_array(spec, u, vgrid=None):
    dom = spec.domain
    vgrid = _v_grid(spec) if vgrid is None else vgrid
    du = grad_array(dom, u)
    dens = spec.phi.value(du) + vgrid * spec.N.value(np.abs(u)) - spec.f.F(u)
    total = float(np.sum(dens)) * dom.cell_volume
    if not math.isfinite(total):
        raise FloatingPointError("energy integrand is not finite")
    return total


def _gradient_array(spec, u, vgrid=None):
    dom = spec.domain
    vgrid = _v_grid(spec) if vgrid is None else vgrid
    flux = spec.phi.gradient(grad_array(dom, u))
    g = div_adjoint_array(dom, flux) + vgrid * spec.N.derivative(np.abs(u)) * np.sign(u) - spec.f.f(u)
    if dom.boundary == "zero_dirichlet":
        g[dom.boundary_mask()] = 0.0
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("energy gradient is not finite")
    return g


def energy(spec: ProblemSpec, u) -> float:
    """``sum [Phi(Du) + V N(|u|) - F(u)] h^n``."""
    return _energy_array(spec, _vals(u))


def energy_gradient(spec: ProblemSpec, u) -> Field:
    """Residual ``g`` with ``<g, v> h^n = J'(u) v``."""
    return Field(spec.domain, _gradient_array(spec, _vals(u)))


def _laplacian_symbol(dom: DomainSpec):
    """Eigenvalues of ``D^T D`` in the FFT (periodic) or DST-I (Dirichlet) basis."""
    m, h = dom.m, dom.h
    if dom.boundary == "periodic":
        k = np.arange(m)
        lam1 = (2.0 - 2.0 * np.cos(2.0 * np.pi * k / m)) / h ** 2
    else:
        k = np.arange(1, m)
        lam1 = (2.0 - 2.0 * np.cos(np.pi * k / m)) / h ** 2
    grids = np.meshgrid(*([lam1] * dom.n), indexing="ij")
    return sum(grids)


def riesz_map(dom: DomainSpec, g, power=-1.0):
    """``(D^T D + I)^power g``; ``power = -1`` is the Sobolev gradient."""
    g = _vals(g)
    sym = (_laplacian_symbol(dom) + 1.0) ** power
    if dom.boundary == "periodic":
        return np.real(sfft.ifftn(sfft.fftn(g) * sym))
    out = np.zeros_like(g)
    inner = (slice(1, None),) * dom.n
    out[inner] = sfft.idstn(sfft.dstn(g[inner], type=1) * sym, type=1)
    return out


def dual_norm(dom: DomainSpec, g) -> float:
    """``sup { <g, v> h^n : ||v||_{H^1_h} <= 1 }`` computed through the Riesz map."""
    g = _vals(g)
    w = riesz_map(dom, g)
    return math.sqrt(max(float(np.sum(g * w)) * dom.cell_volume, 0.0))


# ---------------------------------------------------------------------------
# valley points and ray maxima
# ---------------------------------------------------------------------------


def valley_scale(spec: ProblemSpec, shape, max_doublings=60):
    """``(t, doublings)`` with ``J(t * shape) < 0`` found by doubling from ``t = 1``."""
    u = _vals(shape)
    if not np.any(u):
        raise ValueError("seed shape must be nonzero")
    vg = _v_grid(spec)
    t = 1.0
    for k in range(max_doublings + 1):
        if _energy_array(spec, t * u, vg) < 0.0:
            return t, k
        t *= 2.0
    raise ValueError(f"no valley: J(t u) >= 0 up to t = 2^{max_doublings}; "
                     "the (f3) growth condition is likely violated")


def find_valley_point(spec: ProblemSpec, seed_shape) -> Field:
    t, _ = valley_scale(spec, seed_shape)
    return Field(spec.domain, t * _vals(seed_shape))


def ray_maximum(spec: ProblemSpec, u, points=21, vgrid=None, t_end=None):
    """Highest point of ``s -> J(s u)`` on ``[0, T]`` with ``J(T u) < 0``.

    The path is sampled at ``points`` equally spaced nodes; the best node
    is refined by bounded Brent search on its two neighbouring intervals.
    Returns ``(t_star, J_max, T)``.
    """
    u = _vals(u)
    vg = _v_grid(spec) if vgrid is None else vgrid
    if t_end is None:
        t_end, _ = valley_scale(spec, u)
    else:
        while _energy_array(spec, t_end * u, vg) >= 0.0:
            t_end *= 2.0
    s = np.linspace(0.0, t_end, points)
    js = np.array([_energy_array(spec, si * u, vg) for si in s])
    k = int(np.argmax(js))
    lo, hi = s[max(k - 1, 0)], s[min(k + 1, points - 1)]
    if k == 0:
        return 0.0, 0.0, t_end
    res = minimize_scalar(lambda t: -_energy_array(spec, t * u, vg), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12 * t_end, "maxiter": 200})
    t_star, j_star = float(res.x), -float(res.fun)
    if js[k] > j_star:
        t_star, j_star = float(s[k]), float(js[k])
    return t_star, j_star, t_end


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MPOptions:
    path_points: int = 21
    step: float = 0.1
    tol: float = 1e-4
    max_iter: int = 2000
    backtrack: float = 0.5
    growth: float = 1.5
    keep_every: int = 10
    seed_radius: float = 3.0


@dataclass(eq=False)
class MPResult:
    u_star: Field
    c_est: float
    history: List[tuple]
    verdict: str
    residual: float
    iterates: List[Field]
    t_star: float

    @property
    def converged(self):
        return self.verdict == "converged"


def _nontrivial_mass(spec, u, vg):
    dom = spec.domain
    return float(np.sum(spec.phi.value(grad_array(dom, u)) + vg * spec.N.value(np.abs(u)))
                 * dom.cell_volume)


def mountain_pass_solve(spec: ProblemSpec, opts: Optional[MPOptions] = None,
                        seed_shape: Optional[Field] = None) -> MPResult:
    """Ray-path mountain-pass iteration down to ``dual_norm(J') <= tol``.

    Each accepted step lowers the highest path energy; a rejected step
    shrinks the step length by ``backtrack``, an accepted one grows it by
    ``growth``.
    """
    opts = opts or MPOptions()
    dom = spec.domain
    vg = _v_grid(spec)
    if seed_shape is None:
        seed_shape = bump(dom, radius=opts.seed_radius)
    u = _vals(seed_shape).copy()
    t_star, level, t_end = ray_maximum(spec, u, opts.path_points, vg)
    if t_star == 0.0:
        return MPResult(Field(dom, np.zeros(dom.shape)), 0.0, [], "degenerate_to_zero", 0.0, [], 0.0)
    z = t_star * u
    t_rel = t_end / t_star  # valley scale measured from the current top point
    mass0 = _nontrivial_mass(spec, z, vg)
    eta = opts.step
    history, iterates = [], []
    verdict = "max_iter"
    res = math.inf
    for it in range(opts.max_iter + 1):
        g = _gradient_array(spec, z, vg)
        w = riesz_map(dom, g)
        res = math.sqrt(max(float(np.sum(g * w)) * dom.cell_volume, 0.0))
        history.append((it, level, res))
        if it % opts.keep_every == 0:
            iterates.append(Field(dom, z))
        if _nontrivial_mass(spec, z, vg) < 1e-8 * max(mass0, 1.0) or level <= 0.0:
            verdict = "degenerate_to_zero"
            break
        if res <= opts.tol:
            verdict = "converged"
            break
        if it == opts.max_iter:
            break
        direction = w / res
        stalled = False
        while True:
            trial = z - eta * direction
            ts, jt, te = ray_maximum(spec, trial, opts.path_points, vg, t_end=t_rel)
            if ts > 0.0 and jt <= level:
                z, level, t_rel = ts * trial, jt, te / ts
                eta *= opts.growth
                break
            eta *= opts.backtrack
            if eta < 1e-14:
                stalled = True
                break
        if stalled:
            break
    final = Field(dom, z)
    if not iterates or not np.array_equal(iterates[-1].values, final.values):
        iterates.append(final)
    return MPResult(final, level, history, verdict, res, iterates, t_rel)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PSRecord:
    J: float
    residual_dual_norm: float
    residual_orlicz_norm: float
    lhs: float
    rhs: float
    ps_bound_ok: bool

    def as_dict(self):
        return dict(self.__dict__)


def ps_monitor(spec: ProblemSpec, iterates: Sequence[Field], s_phi=None) -> List[PSRecord]:
    """Check ``(theta - s)/theta * int[Phi(Du) + V N(u)] <= J(u) - J'(u)u / theta`` per iterate.

    Also reports two residual sizes: the ``H^{-1}_h`` dual norm and the
    Luxemburg norm of the residual under the conjugate of ``N``.
    """
    if s_phi is None:
        s_phi = growth_indices(spec.phi).s
    theta = spec.theta
    if not theta > s_phi:
        raise ValueError(f"(f3) requires theta > s_Phi (theta={theta:g}, s_Phi={s_phi:g})")
    dom = spec.domain
    vg = _v_grid(spec)
    n_conj = conjugate_scalar(spec.N) if spec.N.end_exponents[0] > 1 else None
    out = []
    for u in iterates:
        z = _vals(u)
        J = _energy_array(spec, z, vg)
        g = _gradient_array(spec, z, vg)
        pairing = float(np.sum(g * z)) * dom.cell_volume
        lhs = (theta - s_phi) / theta * _nontrivial_mass(spec, z, vg)
        rhs = J - pairing / theta
        tol = 1e-12 * (abs(J) + abs(pairing) / theta + abs(lhs)) + 1e-300
        orl = luxemburg_norm(n_conj, g, dom.cell_volume) if n_conj is not None else math.nan
        out.append(PSRecord(J, dual_norm(dom, g), orl, lhs, rhs, bool(lhs <= rhs + tol)))
    return out


def _ball_footprint(dom: DomainSpec, r):
    k = int(math.floor(r / dom.h + 1e-9))
    ax = np.arange(-k, k + 1) * dom.h
    d2 = sum(np.meshgrid(*([ax ** 2] * dom.n), indexing="ij"))
    return d2 <= r * r * (1 + 1e-12)


def concentration_functional(u: Field, r: float, N: ScalarFunction):
    """``max_y sum_{|x - y| <= r} N(|u(x)|) h^n`` over grid centers ``y``.

    Returns ``(value, center)`` with ``center`` the maximizing node
    coordinates (first one in grid order on ties).
    """
    dom = u.domain
    if not (0 < r <= dom.L / 2):
        raise ValueError(f"ball radius must lie in (0, L/2] = (0, {dom.L / 2:g}]")
    dens = N.value(np.abs(u.values))
    mode = "wrap" if dom.boundary == "periodic" else "constant"
    mass = ndimage.correlate(dens, _ball_footprint(dom, r).astype(float), mode=mode, cval=0.0)
    mass *= dom.cell_volume
    idx = np.unravel_index(int(np.argmax(mass)), mass.shape)
    center = dom.axis()[list(idx)]
    return float(mass[idx]), center


def recenter(u: Field, center, period=None) -> Field:
    """``w(x) = u(x + center)`` by a cyclic shift of the grid.

    ``center`` must be a grid displacement and, when ``period`` is given, a
    point of the lattice ``period * Z^n``; the box width must itself be a
    multiple of the period so the translated potential matches.
    """
    dom = u.domain
    if dom.boundary != "periodic":
        raise ValueError("recentering needs the periodic boundary rule")
    c = np.asarray(center, dtype=float).reshape(dom.n)
    steps = c / dom.h
    if np.any(np.abs(steps - np.round(steps)) > 1e-9):
        raise ValueError("center is not a grid displacement")
    if period is not None:
        per = np.broadcast_to(np.asarray(period, dtype=float), (dom.n,))
        lat = c / per
        box = 2.0 * dom.L / per
        if np.any(np.abs(lat - np.round(lat)) > 1e-9):
            raise ValueError("center is off the potential lattice")
        if np.any(np.abs(box - np.round(box)) > 1e-9):
            raise ValueError("box width is not a multiple of the potential period")
    shift = tuple(-int(round(s)) for s in steps)
    return Field(dom, np.roll(u.values, shift, axis=tuple(range(dom.n))))


# ---------------------------------------------------------------------------
# hypothesis audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HypothesisReport:
    name: str
    verdict: Verdict
    evidence: dict

    def as_dict(self):
        return {"verdict": str(self.verdict), "evidence": self.evidence}


def _decay_verdict(slope, decreasing, pass_slope=0.05, fail_slope=1e-3):
    if slope >= pass_slope and decreasing:
        return Verdict.PASS
    if slope <= fail_slope:
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE


def _ratio_decay(num, den, t):
    r = np.abs(num) / den
    with np.errstate(divide="ignore"):
        lr = np.log(np.maximum(r, 1e-300))
    slope = -float(np.polyfit(np.log(t), lr, 1)[0])
    return r, slope


def _audit_f1(spec):
    t = np.geomspace(1e-6, 1e-2, 41)  # toward 0: ratio should shrink as t decreases
    vals = []
    for sgn in (1.0, -1.0):
        num = spec.f.f(sgn * t) * sgn * t
        r, slope = _ratio_decay(num, spec.N.value(t), t)
        vals.append((r, -slope))
    slope = min(s for _, s in vals)
    decreasing = all(np.all(np.diff(r) >= -1e-12 * r[1:]) for r, _ in vals)
    r0 = max(float(r[0]) for r, _ in vals)
    return HypothesisReport("f1", _decay_verdict(slope, decreasing),
                            {"ratio_at_1e-6": r0, "log_slope": slope, "decades": 4})


def _audit_f2(spec, phi_n):
    t = np.geomspace(1e2, 1e6, 41)
    vals = []
    for sgn in (1.0, -1.0):
        num = spec.f.f(sgn * t) * sgn * t
        r, slope = _ratio_decay(num, phi_n.value(t), t)
        vals.append((r, slope))
    slope = min(s for _, s in vals)
    decreasing = all(np.all(np.diff(r) <= 1e-12 * r[:-1]) for r, _ in vals)
    r1 = max(float(r[-1]) for r, _ in vals)
    return HypothesisReport("f2", _decay_verdict(slope, decreasing),
                            {"ratio_at_1e6": r1, "decay_slope": slope, "decades": 4})


def _audit_f3(spec, s_phi):
    t = np.geomspace(1e-6, 1e6, 121)
    t = np.concatenate([-t[::-1], t])
    F, tf = spec.f.F(t), spec.f.f(t) * t
    gap = tf - spec.theta * F
    tol = 1e-12 * np.maximum(np.abs(tf), np.abs(spec.theta * F))
    ok_ineq = bool(np.all(gap >= -tol))
    ok_pos = bool(np.all(F > 0))
    ok_theta = spec.theta > s_phi
    v = Verdict.PASS if (ok_ineq and ok_pos and ok_theta) else Verdict.FAIL
    return HypothesisReport("f3", v, {"theta": spec.theta, "s_phi": s_phi,
                                      "theta_gt_s_phi": ok_theta, "F_positive": ok_pos,
                                      "min_relative_gap": float(np.min(gap / np.maximum(np.abs(tf), 1e-300))),
                                      "inequality_ok": ok_ineq})


def _potential_samples(spec, rng, per_axis=4):
    n = spec.domain.n
    per = np.asarray(spec.V.period)
    g = (np.arange(per_axis) + 0.5) / per_axis
    sub = np.stack(np.meshgrid(*([g] * n), indexing="ij"), axis=-1).reshape(-1, n) * per
    extra = rng.uniform(0.0, 1.0, size=(256, n)) * per
    return np.concatenate([sub, extra])


def _audit_v(spec):
    rng = np.random.default_rng(spec.seed)
    x = _potential_samples(spec, rng)
    v = spec.V(x)
    v0 = float(v.min())
    grid_min = float(_v_grid(spec).min())
    inf_v = min(v0, grid_min)
    v1 = HypothesisReport("V1", Verdict.PASS if inf_v > 0 else Verdict.FAIL,
                          {"V0": inf_v, "samples": int(len(x))})
    per = np.asarray(spec.V.period)
    resid = 0.0
    for i in range(spec.domain.n):
        for k in (1, -1, 3):
            shifted = x.copy()
            shifted[:, i] += k * per[i]
            resid = max(resid, float(np.max(np.abs(spec.V(shifted) - v) / np.maximum(1.0, np.abs(v)))))
    v2 = HypothesisReport("V2", Verdict.PASS if resid <= 1e-12 else Verdict.FAIL,
                          {"max_translation_residual": resid, "period": list(per)})
    return v1, v2


def audit_assumptions(spec: ProblemSpec, phi_n: Optional[ScalarFunction] = None,
                      phi_circ: Optional[ScalarFunction] = None) -> dict:
    """One :class:`HypothesisReport` per standing hypothesis, keyed by name."""
    phi = spec.phi
    n = phi.n
    if phi_circ is None:
        phi_circ = compute_phi_circ(phi)
    # exact exponent arithmetic decides the borderline p_bar = n for power sums
    exact = phi_circ_power(phi) if phi.kind == "power_sum" else phi_circ
    integ = cj.check_integrability(exact, n)
    if phi_n is None and integ.phi0 == Verdict.PASS and integ.phi1 == Verdict.PASS:
        phi_n = cj.compute_phi_n(phi_circ, n)
    idx_phi = growth_indices(phi)
    idx_n = growth_indices(spec.N)
    out = {}

    dphi = check_delta2_nabla2(phi)
    n_as_g = GFunction.radial(spec.N, 1, name="N")
    dn = check_delta2_nabla2(n_as_g)
    out["Delta"] = HypothesisReport("Delta", combine(dphi.verdict, dn.verdict),
                                    {"phi": dphi.as_dict(), "N": dn.as_dict()})
    out["Phi0"] = HypothesisReport("Phi0", integ.phi0, {"integral_0_1": integ.phi0_value,
                                                         "q0": integ.q0})
    out["Phi1"] = HypothesisReport("Phi1", integ.phi1, {"q_inf": integ.q_inf})
    if phi_n is not None:
        v2, dom2 = cj.check_phi2(phi, phi_n)
        out["Phi2"] = HypothesisReport("Phi2", v2, dom2.as_dict())
    else:
        out["Phi2"] = HypothesisReport("Phi2", Verdict.INCONCLUSIVE, {"reason": "Phi_n not built"})
    nv, ab, ba = cj.equivalent(spec.N, phi_circ)
    out["N1"] = HypothesisReport("N1", nv, {"N_below_phi_circ": ab.as_dict(),
                                            "phi_circ_below_N": ba.as_dict()})
    out["f1"] = _audit_f1(spec)
    if phi_n is not None:
        out["f2"] = _audit_f2(spec, phi_n)
    else:
        out["f2"] = HypothesisReport("f2", Verdict.INCONCLUSIVE, {"reason": "Phi_n not built"})
    out["f3"] = _audit_f3(spec, idx_phi.s)
    out["V1"], out["V2"] = _audit_v(spec)
    out["indices"] = HypothesisReport(
        "indices",
        Verdict.PASS if idx_phi.i <= idx_n.i <= idx_n.s <= idx_phi.s else Verdict.INCONCLUSIVE,
        {"i_phi": idx_phi.i, "s_phi": idx_phi.s, "i_N": idx_n.i, "s_N": idx_n.s})
    return out


def all_pass(report: dict) -> bool:
    return all(r.verdict == Verdict.PASS for r in report.values())


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Verdict):
        return str(x)
    return x


def solve_report(spec: ProblemSpec, result: MPResult, audit: Optional[dict] = None,
                 ps: Optional[Sequence[PSRecord]] = None, extra: Optional[dict] = None) -> dict:
    u = result.u_star
    du = grad_array(u.domain, u.values)
    norms = {
        "grad_phi_luxemburg": luxemburg_norm(spec.phi, du, u.domain.cell_volume),
        "N_luxemburg": luxemburg_norm(spec.N, u),
        "max_abs": float(np.max(np.abs(u.values))),
        "modular_grad": modular(spec.phi, du, u.domain.cell_volume),
    }
    norms["sobolev_total"] = norms["grad_phi_luxemburg"] + norms["N_luxemburg"]
    rep = {
        "c_est": result.c_est,
        "verdict": result.verdict,
        "iterations": max(len(result.history) - 1, 0),
        "residual": result.residual,
        "norms": norms,
        "history": [list(h) for h in result.history],
    }
    if audit is not None:
        rep["audit"] = {k: v.as_dict() for k, v in audit.items()}
    if ps is not None:
        rep["ps_monitor"] = [p.as_dict() for p in ps]
        rep["ps_bound_all"] = all(p.ps_bound_ok for p in ps)
    if extra:
        rep.update(extra)
    return _jsonable(rep)


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"
