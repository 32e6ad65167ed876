"""Spherically symmetric rearrangement of an anisotropic G-function.

``phi_circ`` is the radial profile whose sublevel balls have the same
Lebesgue measure as the sublevel sets of ``Phi``::

    vol{v : phi_circ(|v|) <= t} == vol{v : Phi(v) <= t}

Volumes come either from the closed Dirichlet formula (power sums only) or
from Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.special import gammaln
from scipy.stats import qmc

from .young import GFunction, ScalarFunction, default_plan

__all__ = [
    "VolumeModel",
    "unit_ball_volume",
    "dirichlet_constant",
    "level_set_volume",
    "compute_phi_circ",
    "phi_circ_power",
    "left_cont_inverse",
]

_CHUNK = 1 << 16


@dataclass(frozen=True)
class VolumeModel:
    """How sublevel-set volumes are measured.

    method
        ``"exact_dirichlet"`` (power sums only) or ``"monte_carlo"`` (hit
        fraction in a bounding box).
    """

    method: str = "exact_dirichlet"
    samples: int = 100_000
    seed: int = 0
    inflation: float = 1.01

    def __post_init__(self):
        if self.method not in ("exact_dirichlet", "monte_carlo"):
            raise ValueError(f"unknown volume method {self.method!r}")
        if self.samples < 1 or self.inflation < 1.0:
            raise ValueError("samples must be >= 1 and inflation >= 1")


def unit_ball_volume(n):
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def dirichlet_constant(phi: GFunction):
    """``(D, sigma)`` with ``vol{Phi <= t} = D * t**sigma`` for a power sum."""
    if phi.kind != "power_sum":
        raise ValueError("exact volumes need a power_sum G-function")
    p = np.asarray(phi.exponents)
    a = np.asarray(phi.coefficients)
    sigma = float(np.sum(1.0 / p))
    log_d = float(np.sum(math.log(2.0) + gammaln(1.0 + 1.0 / p) - np.log(a) / p)
                  - gammaln(1.0 + sigma))
    return math.exp(log_d), sigma


def _ray_extent(phi, t, dirs, iters=80):
    """Radius where ``Phi(r d) = t`` along each direction (bisection in log r)."""
    lo = np.full(len(dirs), 1e-300)
    hi = np.ones(len(dirs))
    for _ in range(2000):
        above = phi.value(hi[:, None] * dirs) > t
        if np.all(above):
            break
        hi = np.where(above, hi, hi * 2.0)
    else:  # pragma: no cover - Phi bounded along a ray
        raise ValueError("level set is unbounded along some direction")
    lo = np.minimum(lo, hi / 2.0)
    for _ in range(iters):
        mid = np.sqrt(lo * hi)
        inside = phi.value(mid[:, None] * dirs) <= t
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return hi


def _box_half_widths(phi, t, model):
    if phi.kind == "power_sum":
        p = np.asarray(phi.exponents)
        a = np.asarray(phi.coefficients)
        return (t / a) ** (1.0 / p) * model.inflation
    # the sampled hull underestimates a convex body, so inflate harder
    dirs = default_plan(phi.n, seed=model.seed, n_random=512).directions
    ext = _ray_extent(phi, t, dirs)
    return np.max(ext[:, None] * np.abs(dirs), axis=0) * max(model.inflation, 1.25)


def level_set_volume(phi: GFunction, t, model: Optional[VolumeModel] = None):
    """``(volume, stderr)`` of ``{v : Phi(v) <= t}``."""
    model = model or VolumeModel()
    t = float(t)
    if not (t > 0):
        raise ValueError("t must be > 0")
    if model.method == "exact_dirichlet":
        d, sigma = dirichlet_constant(phi)
        return d * t ** sigma, 0.0
    rng = np.random.default_rng(model.seed)
    n = phi.n
    b = _box_half_widths(phi, t, model)
    hits = 0
    left = model.samples
    while left > 0:
        k = min(left, _CHUNK)
        x = rng.uniform(-1.0, 1.0, size=(k, n)) * b
        hits += int(np.count_nonzero(phi.value(x) <= t))
        left -= k
    box = float(np.prod(2.0 * b))
    frac = hits / model.samples
    return box * frac, box * math.sqrt(frac * (1.0 - frac) / model.samples)


def _bisect_levels(volume_of, target, t_lo, t_hi, rtol=1e-8, max_iter=200):
    """Least ``t`` with ``volume_of(t) >= target``, vectorized over targets."""
    lo = np.full_like(target, t_lo)
    hi = np.full_like(target, t_hi)
    if np.any(volume_of(hi) < target) or np.any(volume_of(lo) >= target):
        raise ValueError("level bisection does not bracket; Phi looks degenerate")
    for _ in range(max_iter):
        if np.all(hi - lo <= rtol * hi):
            break
        mid = np.sqrt(lo * hi)
        ok = volume_of(mid) >= target
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi


def _mc_volume_fn(phi, radii, model, levels=600):
    """Monotone volume-vs-level table for a callable G-function.

    Extents along the sample-plan directions are read off tabulated ray
    profiles, giving a bounding box for every level.  One scrambled Sobol
    cloud in ``[-1, 1]^n`` is stretched to each box, so the hit fractions
    share their samples across levels.
    """
    n = phi.n
    dirs = default_plan(n, seed=model.seed).directions
    rgrid = np.geomspace(radii[0] * 1e-3, radii[-1] * 1e3, 1201)
    with np.errstate(over="ignore"):
        prof = phi.value(rgrid[None, :, None] * dirs[:, None, :])
    prof = np.maximum.accumulate(prof, axis=1)
    t_min = float(prof[:, 0].max())
    t_max = float(prof[:, -1].min())
    if not (0 < t_min < t_max < np.inf):
        raise ValueError("ray profiles do not cover a common level range")
    lt = np.linspace(math.log(t_min), math.log(t_max), levels)
    lr = np.log(rgrid)
    lp = np.log(np.maximum(prof, 1e-300))
    ext = np.exp(np.array([np.interp(lt, row, lr) for row in lp]))  # (dirs, levels)
    half = np.max(ext[:, :, None] * np.abs(dirs)[:, None, :], axis=0)
    half *= max(model.inflation, 1.25)
    m = int(2 ** math.ceil(math.log2(min(model.samples, 1 << 15))))
    cloud = 2.0 * qmc.Sobol(n, scramble=True, seed=model.seed).random(m) - 1.0
    vol = np.empty(levels)
    for k in range(levels):
        hits = np.count_nonzero(phi.value(cloud * half[k]) <= math.exp(lt[k]))
        vol[k] = np.prod(2.0 * half[k]) * hits / m
    vol = np.maximum.accumulate(np.maximum(vol, 1e-300))
    lvol = np.log(vol)

    def volume_of(t):
        return np.exp(np.interp(np.log(t), lt, lvol))

    return volume_of, t_min, t_max


def compute_phi_circ(phi: GFunction, radii=None, model: Optional[VolumeModel] = None):
    """Tabulate the rearrangement ``phi_circ`` on log-spaced radii.

    ``phi_circ(r)`` is the least level ``t`` whose sublevel set is at least
    as large as the ball of radius ``r``; found by bisection per radius
    (relative tolerance 1e-8).  Flat pieces of the volume function resolve
    to the least such ``t``.
    """
    if radii is None:
        radii = np.geomspace(1e-3, 1e3, 200)
    radii = np.asarray(radii, dtype=float)
    if model is None:
        model = VolumeModel("exact_dirichlet" if phi.kind == "power_sum" else "monte_carlo")
    n = phi.n
    target = unit_ball_volume(n) * radii ** n

    if model.method == "exact_dirichlet":
        d, sigma = dirichlet_constant(phi)

        def volume_of(t):
            return d * t ** sigma

        guess = (target / d) ** (1.0 / sigma)
        levels = _bisect_levels(volume_of, target, guess.min() / 4.0, guess.max() * 4.0)
    else:
        volume_of, t_min, t_max = _mc_volume_fn(phi, radii, model)
        levels = _bisect_levels(volume_of, target, t_min, t_max)
    levels = np.maximum.accumulate(levels)
    keep = np.concatenate([[True], np.diff(levels) > 0])
    return ScalarFunction.table(radii[keep], levels[keep], name=f"phi_circ[{phi.name}]")


def phi_circ_power(phi: GFunction) -> ScalarFunction:
    """Closed form ``kappa * r**p_bar`` of the rearrangement of a power sum."""
    d, sigma = dirichlet_constant(phi)
    n = phi.n
    kappa = (unit_ball_volume(n) / d) ** (1.0 / sigma)
    p_bar = n / sum(1 / Fraction(repr(float(p))) for p in phi.exponents)
    return ScalarFunction.power(float(p_bar), kappa, name=f"phi_circ[{phi.name}]")


def left_cont_inverse(f: ScalarFunction, y):
    """The least ``t`` with ``f(t) >= y``."""
    return f.inverse(y)
