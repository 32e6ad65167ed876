"""Grid fields on a truncated box, modulars and Luxemburg norms.

The box is ``[-L, L)^n`` with ``m`` nodes per axis at ``x_j = -L + j h``,
``h = 2L/m``.  Gradients are forward differences, wrapped for the periodic
rule; for ``zero_dirichlet`` the first layer on every axis is pinned to 0
and the node past the last one is an implicit zero.  Integrals are the
cell sums ``sum G(w) h^n``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .young import GFunction, GrowthIndices, ScalarFunction, xi_bounds

__all__ = [
    "DomainSpec",
    "Field",
    "VectorField",
    "gradient_field",
    "divergence_adjoint",
    "modular",
    "luxemburg_norm",
    "sobolev_norm",
    "SobolevNorm",
    "verify_modular_norm_bounds",
    "verify_sobolev_inequality",
    "bump",
    "random_bump_sum",
    "dump_field",
    "load_field",
]

BOUNDARY_RULES = ("zero_dirichlet", "periodic")


@dataclass(frozen=True)
class DomainSpec:
    n: int
    L: float
    m: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if not (self.L > 0):
            raise ValueError("half-width L must be > 0")
        if self.m < 8:
            raise ValueError("need at least 8 points per axis")
        if self.boundary not in BOUNDARY_RULES:
            raise ValueError(f"boundary must be one of {BOUNDARY_RULES}")

    @property
    def h(self):
        return 2.0 * self.L / self.m

    @property
    def shape(self):
        return (self.m,) * self.n

    @property
    def cell_volume(self):
        return self.h ** self.n

    def axis(self):
        return -self.L + self.h * np.arange(self.m)

    def coordinates(self):
        """Node coordinates, shape ``(m, ..., m, n)``."""
        ax = self.axis()
        return np.stack(np.meshgrid(*([ax] * self.n), indexing="ij"), axis=-1)

    def boundary_mask(self):
        """True on the pinned layer (``zero_dirichlet`` only)."""
        mask = np.zeros(self.shape, dtype=bool)
        if self.boundary == "zero_dirichlet":
            for i in range(self.n):
                idx = [slice(None)] * self.n
                idx[i] = 0
                mask[tuple(idx)] = True
        return mask

    def refined(self, factor=2):
        return DomainSpec(self.n, self.L, self.m * factor, self.boundary)


@dataclass(frozen=True, eq=False)
class Field:
    domain: DomainSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.domain.shape:
            raise ValueError(f"values shape {v.shape} != grid {self.domain.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field has non-finite values")
        if self.domain.boundary == "zero_dirichlet":
            v[self.domain.boundary_mask()] = 0.0
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, domain):
        return cls(domain, np.zeros(domain.shape))

    @classmethod
    def from_function(cls, domain, func):
        return cls(domain, func(domain.coordinates()))

    def __add__(self, other):
        return Field(self.domain, self.values + _vals(other))

    def __sub__(self, other):
        return Field(self.domain, self.values - _vals(other))

    def __mul__(self, c):
        return Field(self.domain, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.domain, -self.values)

    def inner(self, other):
        """Discrete ``L^2`` pairing ``sum u v h^n``."""
        return float(np.sum(self.values * _vals(other)) * self.domain.cell_volume)


def _vals(x):
    return x.values if isinstance(x, (Field, VectorField)) else x


@dataclass(frozen=True, eq=False)
class VectorField:
    """Per-node n-vectors, shape ``(m, ..., m, n)``."""

    domain: DomainSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.domain.shape + (self.domain.n,):
            raise ValueError("vector field shape does not match the grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("vector field has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __sub__(self, other):
        return VectorField(self.domain, self.values - _vals(other))

    def __add__(self, other):
        return VectorField(self.domain, self.values + _vals(other))

    def __mul__(self, c):
        return VectorField(self.domain, self.values * float(c))

    __rmul__ = __mul__


def _shift_next(a, axis, periodic):
    """``a`` at ``x + h e_axis``."""
    if periodic:
        return np.roll(a, -1, axis=axis)
    out = np.zeros_like(a)
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    src[axis] = slice(1, None)
    dst[axis] = slice(0, -1)
    out[tuple(dst)] = a[tuple(src)]
    return out


def _shift_prev(a, axis, periodic):
    """``a`` at ``x - h e_axis``."""
    if periodic:
        return np.roll(a, 1, axis=axis)
    out = np.zeros_like(a)
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    src[axis] = slice(0, -1)
    dst[axis] = slice(1, None)
    out[tuple(dst)] = a[tuple(src)]
    return out


def grad_array(dom: DomainSpec, u):
    periodic = dom.boundary == "periodic"
    return np.stack([(_shift_next(u, i, periodic) - u) / dom.h for i in range(dom.n)],
                    axis=-1)


def div_adjoint_array(dom: DomainSpec, q):
    """Adjoint of the forward difference: ``sum_i (q_i(x - h e_i) - q_i(x)) / h``."""
    periodic = dom.boundary == "periodic"
    out = np.zeros(dom.shape)
    for i in range(dom.n):
        qi = q[..., i]
        out += (_shift_prev(qi, i, periodic) - qi) / dom.h
    return out


def gradient_field(u: Field) -> VectorField:
    return VectorField(u.domain, grad_array(u.domain, u.values))


def divergence_adjoint(q: VectorField) -> Field:
    """``D^T q`` so that ``<D^T q, v> = <q, D v>``; equals ``-div q`` to first order."""
    return Field(q.domain, div_adjoint_array(q.domain, q.values))


# ---------------------------------------------------------------------------
# modulars and norms
# ---------------------------------------------------------------------------


def _pointwise(G, w):
    w = _vals(w)
    if isinstance(G, ScalarFunction):
        return G.value(np.abs(w))
    return G.value(w)


def modular(G, w, cell_volume=None):
    """``sum G(w) h^n`` (scalar ``G`` is applied to ``|w|``)."""
    if cell_volume is None:
        cell_volume = w.domain.cell_volume
    return float(np.sum(_pointwise(G, w)) * cell_volume)


def _modular_of_scale(G, w, cell_volume):
    """Return ``k -> modular(G, w/k)``, precomputing power sums where possible."""
    a = np.abs(_vals(w))
    if isinstance(G, ScalarFunction) and G.kind == "power":
        S = G.scale * float(np.sum(a ** G.exponent)) * cell_volume
        q = G.exponent
        return lambda k: S * k ** (-q)
    if isinstance(G, GFunction) and G.kind == "power_sum":
        p = np.asarray(G.exponents)
        S = np.asarray(G.coefficients) * np.array(
            [np.sum(a[..., i] ** p[i]) for i in range(G.n)]) * cell_volume
        return lambda k: float(np.sum(S * k ** (-p)))
    vals = _vals(w)
    return lambda k: float(np.sum(_pointwise(G, vals / k)) * cell_volume)


def luxemburg_norm(G, w, cell_volume=None, rtol=1e-10):
    """``inf{k > 0 : modular(G, w/k) <= 1}`` by bisection in ``log k``.

    Bracket starts at ``[1e-12, 1e12]`` and is doubled outward if needed.
    """
    if cell_volume is None:
        cell_volume = w.domain.cell_volume
    if not np.any(_vals(w)):
        return 0.0
    m = _modular_of_scale(G, w, cell_volume)
    lo, hi = 1e-12, 1e12
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        for _ in range(200):
            if m(lo) > 1.0:
                break
            lo /= 2.0 ** 16
        else:
            raise ValueError("modular stays <= 1 at every scale; G looks degenerate")
        for _ in range(200):
            if m(hi) <= 1.0:
                break
            hi *= 2.0 ** 16
        else:
            raise ValueError("modular never drops to 1; G looks degenerate")
        llo, lhi = math.log(lo), math.log(hi)
        while lhi - llo > rtol:
            mid = 0.5 * (llo + lhi)
            if m(math.exp(mid)) <= 1.0:
                lhi = mid
            else:
                llo = mid
    return math.exp(lhi)


@dataclass(frozen=True)
class SobolevNorm:
    grad_part: float
    zero_order_part: float

    @property
    def total(self):
        return self.grad_part + self.zero_order_part


def sobolev_norm(phi: GFunction, N: ScalarFunction, u: Field) -> SobolevNorm:
    """``||grad u||_Phi + ||u||_N``."""
    return SobolevNorm(luxemburg_norm(phi, gradient_field(u)), luxemburg_norm(N, u))


@dataclass(frozen=True)
class BoundsReport:
    norm: float
    modular: float
    lower: float
    upper: float

    @property
    def lower_ok(self):
        return self.lower <= self.modular * (1 + 1e-9) + 1e-300

    @property
    def upper_ok(self):
        return self.modular <= self.upper * (1 + 1e-9) + 1e-300

    @property
    def slack(self):
        return self.modular - self.lower, self.upper - self.modular


def verify_modular_norm_bounds(G, w, idx: GrowthIndices) -> BoundsReport:
    """Check ``xi_lower(||w||) <= modular(G, w) <= xi_upper(||w||)``."""
    nrm = luxemburg_norm(G, w)
    mod = modular(G, w)
    lo, up = xi_bounds(idx, nrm)
    return BoundsReport(nrm, mod, lo, up)


@dataclass(frozen=True, eq=False)
class SobolevReport:
    K_est: float
    ratios: np.ndarray
    K_integral: Optional[float]


def verify_sobolev_inequality(phi: GFunction, phi_n: ScalarFunction, fields: Sequence[Field],
                              K_grid=None) -> SobolevReport:
    """Empirical constant in ``||u||_{Phi_n} <= K ||grad u||_Phi``.

    ``K_est`` is the largest observed ratio, an empirical lower bound on
    the true constant.  ``K_integral`` is the smallest ``K`` in ``K_grid``
    for which the integral form

        sum Phi_n(|u| / (K (sum Phi(grad u))^{1/n})) <= sum Phi(grad u)

    holds for every field (``None`` if none does).
    """
    ratios = []
    for u in fields:
        gn = luxemburg_norm(phi, gradient_field(u))
        un = luxemburg_norm(phi_n, u)
        if gn == 0.0:
            if un != 0.0:
                raise ValueError("zero gradient with nonzero field")
            ratios.append(0.0)
        else:
            ratios.append(un / gn)
    ratios = np.array(ratios)
    K_est = float(ratios.max()) if len(ratios) else 0.0
    if K_grid is None:
        K_grid = K_est * np.array([0.25, 0.5, 1.0, 2.0, 4.0]) if K_est > 0 else [1.0]
    K_int = None
    for K in sorted(K_grid):
        ok = True
        for u in fields:
            g_mod = modular(phi, gradient_field(u))
            if g_mod == 0.0:
                continue
            denom = K * g_mod ** (1.0 / u.domain.n)
            if modular(phi_n, u.values / denom, u.domain.cell_volume) > g_mod * (1 + 1e-12):
                ok = False
                break
        if ok:
            K_int = float(K)
            break
    return SobolevReport(K_est, ratios, K_int)


# ---------------------------------------------------------------------------
# test fields and I/O
# ---------------------------------------------------------------------------


def bump(domain: DomainSpec, center=None, radius=1.0, amplitude=1.0):
    """Compactly supported ``amplitude * (1 - |x-c|^2/radius^2)_+^2``."""
    c = np.zeros(domain.n) if center is None else np.asarray(center, dtype=float)
    r2 = np.sum((domain.coordinates() - c) ** 2, axis=-1) / radius ** 2
    return Field(domain, amplitude * np.clip(1.0 - r2, 0.0, None) ** 2)


def random_bump_sum(domain: DomainSpec, rng, count=3, radius=(1.0, 2.0), amplitude=(-1.0, 1.0),
                    margin=None):
    """Sum of ``count`` bumps with seeded centers, radii and amplitudes.

    Centers keep a ``margin`` (default: the largest radius plus one cell)
    from the box edge so every bump is compactly supported inside.
    """
    margin = radius[1] + domain.h if margin is None else margin
    total = np.zeros(domain.shape)
    for _ in range(count):
        c = rng.uniform(-domain.L + margin, domain.L - margin, size=domain.n)
        r = rng.uniform(*radius)
        a = rng.uniform(*amplitude)
        total += bump(domain, c, r, a).values
    return Field(domain, total)


def dump_field(u: Field, path):
    """CSV with header ``x1,...,xn,value``; rows in lexicographic grid order."""
    dom = u.domain
    ax = [f"{x:.17g}" for x in dom.axis()]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(dom.n)] + ["value"])
        for idx in np.ndindex(*dom.shape):
            w.writerow([ax[j] for j in idx] + [f"{u.values[idx]:.17g}"])


def load_field(path, boundary="periodic") -> Field:
    """Inverse of :func:`dump_field`; the grid is recovered from the coordinates."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    n = len(header) - 1
    if header != [f"x{i + 1}" for i in range(n)] + ["value"]:
        raise ValueError(f"unexpected header {header}")
    data = np.array([[float(x) for x in r] for r in body])
    m = int(round(len(data) ** (1.0 / n)))
    if m ** n != len(data):
        raise ValueError("row count is not a full grid")
    x0 = data[0, 0]
    L = -x0
    dom = DomainSpec(n, L, m, boundary)
    if not np.allclose(data[:m ** (n - 1) * m:m ** (n - 1), 0], dom.axis(), rtol=0, atol=1e-12 * L):
        raise ValueError("coordinates do not match a uniform [-L, L) grid")
    return Field(dom, data[:, -1].reshape(dom.shape))
