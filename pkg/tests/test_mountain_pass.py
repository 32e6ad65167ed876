import numpy as np
import pytest

from anisorlicz import mountain_pass as mp
from anisorlicz.spaces import DomainSpec, Field, bump, grad_array, random_bump_sum, sobolev_norm
from anisorlicz.young import GFunction, ScalarFunction, Verdict


def quadratic_spec(domain, f=None, V=None):
    n = domain.n
    return mp.ProblemSpec(
        phi=GFunction.power_sum([2.0] * n, [0.5] * n),
        N=ScalarFunction.power(2.0, 0.5),
        V=V or mp.Potential.constant(n),
        f=f or mp.Nonlinearity.zero(),
        theta=4.0,
        domain=domain,
    )


def with_f(spec, f, theta=None):
    return mp.ProblemSpec(spec.phi, spec.N, spec.V, f, theta or spec.theta, spec.domain)


def with_v(spec, V):
    return mp.ProblemSpec(spec.phi, spec.N, V, spec.f, spec.theta, spec.domain)


class TestEnergy:
    def test_zero_field(self, default_spec):
        assert mp.energy(default_spec, Field.zeros(default_spec.domain)) == 0.0

    def test_no_reaction_is_the_modular_sum(self, default_spec):
        spec = with_f(default_spec, mp.Nonlinearity.zero())
        rng = np.random.default_rng(0)
        u = Field(spec.domain, rng.normal(size=spec.domain.shape))
        du = grad_array(spec.domain, u.values)
        expected = (np.sum(spec.phi.value(du)) + np.sum(spec.N.value(np.abs(u.values)))) * spec.domain.cell_volume
        assert mp.energy(spec, u) == pytest.approx(expected, rel=1e-13)
        assert mp.energy(spec, u) >= 0

    def test_large_multiple_of_a_bump_is_negative(self, default_spec):
        b = bump(default_spec.domain, radius=2.0)
        assert mp.energy(default_spec, b * 100.0) < 0

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_non_finite(self, default_spec):
        with pytest.raises(FloatingPointError):
            mp.energy(default_spec, np.full(default_spec.domain.shape, 1e200))


class TestEnergyGradient:
    def test_vanishes_at_zero(self, default_spec):
        g = mp.energy_gradient(default_spec, Field.zeros(default_spec.domain))
        assert np.all(g.values == 0)

    @pytest.mark.parametrize("boundary", ["periodic", "zero_dirichlet"])
    def test_linear_case_eigenfunction(self, boundary):
        d = DomainSpec(3, 2.0, 16, boundary)
        spec = quadratic_spec(d)
        j = np.arange(d.m)
        if boundary == "periodic":
            prof = np.cos(2 * np.pi * 3 * j / d.m)
            lam1 = (2 - 2 * np.cos(2 * np.pi * 3 / d.m)) / d.h ** 2
        else:
            prof = np.sin(np.pi * 2 * j / d.m)
            lam1 = (2 - 2 * np.cos(np.pi * 2 / d.m)) / d.h ** 2
        u = prof[:, None, None] * prof[None, :, None] * prof[None, None, :]
        g = mp.energy_gradient(spec, u).values
        lam = 3 * lam1 + 1.0
        np.testing.assert_allclose(g, lam * u, atol=1e-8 * lam)

    def test_directional_derivatives(self, default_spec):
        rng = np.random.default_rng(1)
        base = bump(default_spec.domain, radius=3.0).values
        for _ in range(20):
            u = base * rng.uniform(0.5, 3) + 0.1 * rng.normal(size=base.shape)
            v = rng.normal(size=base.shape)
            eps = 1e-6
            fd = (mp.energy(default_spec, u + eps * v) - mp.energy(default_spec, u - eps * v)) / (2 * eps)
            an = mp.energy_gradient(default_spec, u).inner(v)
            assert abs(fd - an) <= 1e-4 * abs(an)

    def test_dirichlet_gradient_respects_pinned_layer(self):
        d = DomainSpec(3, 4.0, 16, "zero_dirichlet")
        spec = mp.ProblemSpec(GFunction.power_sum([1.8, 2, 2.2]), ScalarFunction.power(2.0),
                              mp.Potential.constant(3), mp.Nonlinearity.power(4.0), 4.0, d)
        rng = np.random.default_rng(2)
        u = Field(d, rng.normal(size=d.shape))
        g = mp.energy_gradient(spec, u).values
        assert np.all(g[d.boundary_mask()] == 0)
        for _ in range(5):
            v = Field(d, rng.normal(size=d.shape)).values
            eps = 1e-6
            fd = (mp.energy(spec, u.values + eps * v) - mp.energy(spec, u.values - eps * v)) / (2 * eps)
            assert fd == pytest.approx(np.sum(g * v) * d.cell_volume, rel=1e-5)


class TestValley:
    def test_default_problem(self, default_spec):
        e = mp.find_valley_point(default_spec, bump(default_spec.domain, radius=2.0))
        assert mp.energy(default_spec, e) < 0

    def test_no_reaction_has_no_valley(self, default_spec):
        spec = with_f(default_spec, mp.Nonlinearity.zero())
        with pytest.raises(ValueError, match="no valley"):
            mp.find_valley_point(spec, bump(spec.domain, radius=2.0))

    def test_steeper_reaction_needs_fewer_doublings(self, default_spec):
        shape = bump(default_spec.domain, radius=2.0)
        counts = [mp.valley_scale(with_f(default_spec, mp.Nonlinearity.power(q), q), shape)[1]
                  for q in (4.0, 5.0, 6.0)]
        assert counts[0] >= counts[1] >= counts[2]
        assert counts[0] > counts[2]

    def test_zero_shape(self, default_spec):
        with pytest.raises(ValueError):
            mp.valley_scale(default_spec, Field.zeros(default_spec.domain))


class TestSolver:
    def test_converges(self, default_run):
        assert default_run.verdict == "converged"
        assert default_run.residual <= 1e-4
        assert default_run.c_est > 0
        assert np.abs(default_run.u_star.values).max() > 0.1

    def test_level_is_nonincreasing(self, default_run):
        levels = [h[1] for h in default_run.history]
        assert all(b <= a for a, b in zip(levels, levels[1:]))

    def test_top_of_ray(self, default_spec, default_run):
        # J'(u*) u* = 0 at the top of the ray through u*
        u = default_run.u_star
        g = mp.energy_gradient(default_spec, u)
        assert abs(g.inner(u)) <= 1e-6 * mp._nontrivial_mass(default_spec, u.values, 1.0)

    def test_mountain_pass_geometry(self, default_spec, default_run):
        rng = np.random.default_rng(4)
        d = default_spec.domain
        for _ in range(5):
            u = random_bump_sum(d, rng, count=2, radius=(1.5, 3.0))
            rho = sobolev_norm(default_spec.phi, default_spec.N, u).total
            small = u * (0.05 / rho)
            assert mp.energy(default_spec, small) > 0
            assert mp.energy(default_spec, small) < default_run.c_est
        assert mp.energy(default_spec, default_run.u_star * 3.0) < 0

    def test_monotone_operator_cellwise(self, default_spec, default_run):
        its = default_run.iterates
        d = default_spec.domain
        for a, b in zip(its, its[1:]):
            da, db = grad_array(d, a.values), grad_array(d, b.values)
            prod = np.sum((default_spec.phi.gradient(da) - default_spec.phi.gradient(db)) * (da - db), axis=-1)
            assert prod.min() >= 0

    def test_forced_early_stop(self, default_spec):
        r = mp.mountain_pass_solve(default_spec, mp.MPOptions(max_iter=1))
        assert r.verdict == "max_iter"
        assert r.c_est > 0 and len(r.history) == 2

    def test_no_reaction_refused(self, default_spec):
        with pytest.raises(ValueError, match="no valley"):
            mp.mountain_pass_solve(with_f(default_spec, mp.Nonlinearity.zero()))

    @pytest.mark.slow
    def test_quadratic_case_refines(self):
        # continuum level of -Lap u + u = u^3 in R^3 is about 18.9
        levels = []
        for m in (32, 64):
            d = DomainSpec(3, 3.0, m)
            spec = quadratic_spec(d, f=mp.Nonlinearity.power(4.0))
            r = mp.mountain_pass_solve(spec, mp.MPOptions(seed_radius=2.0))
            assert r.converged
            levels.append(r.c_est)
        assert levels[0] == pytest.approx(levels[1], rel=0.1)


class TestPSMonitor:
    def test_zero(self, default_spec):
        rec = mp.ps_monitor(default_spec, [Field.zeros(default_spec.domain)])[0]
        assert rec.J == 0 and rec.residual_dual_norm == 0 and rec.ps_bound_ok

    def test_all_iterates(self, default_spec, default_run):
        recs = mp.ps_monitor(default_spec, default_run.iterates)
        assert len(recs) == len(default_run.iterates) >= 2
        assert all(r.ps_bound_ok for r in recs)
        assert recs[-1].residual_dual_norm <= 1e-4

    def test_blocks_small_theta(self, default_spec):
        spec = with_f(default_spec, mp.Nonlinearity.power(2.1), theta=2.1)
        with pytest.raises(ValueError, match="theta"):
            mp.ps_monitor(spec, [Field.zeros(spec.domain)])


class TestConcentration:
    def test_zero(self, default_spec):
        val, _ = mp.concentration_functional(Field.zeros(default_spec.domain), 1.0, default_spec.N)
        assert val == 0.0

    def test_bump_at_origin(self, default_spec):
        val, c = mp.concentration_functional(bump(default_spec.domain, radius=2.0), 1.0, default_spec.N)
        assert val > 0
        np.testing.assert_array_equal(c, [0.0, 0.0, 0.0])

    def test_translation(self, default_spec):
        b = bump(default_spec.domain, center=[1.0, -2.0, 0.5], radius=2.0)
        v0, c0 = mp.concentration_functional(b, 1.0, default_spec.N)
        w = mp.recenter(b, [1.0, -2.0, 0.0], period=1.0)
        v1, c1 = mp.concentration_functional(w, 1.0, default_spec.N)
        assert v1 == v0
        np.testing.assert_allclose(c0 - c1, [1.0, -2.0, 0.0])

    def test_wraps_across_the_box(self, default_spec):
        d = default_spec.domain
        b = bump(d, radius=2.0)
        shifted = Field(d, np.roll(b.values, d.m // 2, axis=0))
        v0, _ = mp.concentration_functional(b, 1.0, default_spec.N)
        v1, c1 = mp.concentration_functional(shifted, 1.0, default_spec.N)
        assert v1 == pytest.approx(v0, rel=1e-14)
        assert c1[0] == -d.L

    def test_radius_too_large(self, default_spec):
        with pytest.raises(ValueError):
            mp.concentration_functional(Field.zeros(default_spec.domain), 5.0, default_spec.N)


class TestRecenter:
    def test_identity(self, default_spec):
        u = bump(default_spec.domain, center=[0.5, 0, 0], radius=2.0)
        assert np.array_equal(mp.recenter(u, [0, 0, 0]).values, u.values)

    def test_constant_potential(self, default_spec, default_run):
        u = default_run.u_star
        w = mp.recenter(u, [3.0, -1.0, 2.0], period=1.0)
        assert mp.energy(default_spec, w) == pytest.approx(mp.energy(default_spec, u), rel=1e-15)

    def test_periodic_potential(self, default_spec, default_run):
        spec = with_v(default_spec, mp.Potential.cosine_product(3))
        u = default_run.u_star
        w = mp.recenter(u, [1.0, 0.0, 0.0], spec.V.period)
        assert abs(mp.energy(spec, w) - mp.energy(spec, u)) <= 1e-10
        assert np.array_equal(np.sort(w.values, axis=None), np.sort(u.values, axis=None))

    def test_off_lattice(self, default_spec):
        u = bump(default_spec.domain, radius=2.0)
        with pytest.raises(ValueError, match="lattice"):
            mp.recenter(u, [0.5, 0, 0], period=1.0)
        with pytest.raises(ValueError, match="grid"):
            mp.recenter(u, [0.3, 0, 0])

    def test_needs_periodic_rule(self):
        d = DomainSpec(2, 2.0, 8, "zero_dirichlet")
        with pytest.raises(ValueError):
            mp.recenter(Field.zeros(d), [1.0, 0.0])


class TestAudit:
    def test_default_problem_passes(self, default_spec):
        rep = mp.audit_assumptions(default_spec)
        assert {k: str(v.verdict) for k, v in rep.items()} == {k: "PASS" for k in rep}
        assert rep["f3"].evidence["s_phi"] == 2.2

    def test_linear_reaction_breaks_f1(self):
        d = DomainSpec(2, 2.0, 8)
        spec = mp.ProblemSpec(GFunction.power_sum([2, 2]), ScalarFunction.power(2.0),
                              mp.Potential.constant(2), mp.Nonlinearity.power(2.0), 2.0 + 1e-9, d)
        assert mp._audit_f1(spec).verdict == Verdict.FAIL

    def test_cosine_potential(self, default_spec):
        spec = with_v(default_spec, mp.Potential.cosine_product(3))
        v1, v2 = mp._audit_v(spec)
        assert v1.verdict == Verdict.PASS and v1.evidence["V0"] == pytest.approx(0.5)
        assert v2.verdict == Verdict.PASS

    def test_non_periodic_potential(self, default_spec):
        V = mp.Potential(lambda x: 1.0 + 0.1 * x[..., 0] ** 2, (1.0, 1.0, 1.0))
        _, v2 = mp._audit_v(with_v(default_spec, V))
        assert v2.verdict == Verdict.FAIL

    def test_fast_reaction_breaks_f2(self, default_spec):
        spec = with_f(default_spec, mp.Nonlinearity.power(7.0), 7.0)
        rep = mp.audit_assumptions(spec)
        assert rep["f2"].verdict == Verdict.FAIL
        assert rep["f1"].verdict == Verdict.PASS

    def test_four_dimensional_example_fails_phi2(self):
        d = DomainSpec(4, 4.0, 8)
        p = (2, 2, 2, 7)
        spec = mp.ProblemSpec(GFunction.power_sum(p), ScalarFunction.power(56 / 23),
                              mp.Potential.constant(4), mp.Nonlinearity.power(8.0), 8.0, d)
        rep = mp.audit_assumptions(spec)
        assert rep["Phi2"].verdict == Verdict.FAIL
        assert rep["N1"].verdict == Verdict.PASS


class TestNonlinearity:
    def test_power_pair(self):
        nl = mp.Nonlinearity.power(4.0)
        nl.validate()
        assert nl.f(np.array(-2.0)) == -8.0 and nl.F(np.array(2.0)) == 4.0

    def test_offset_rejected(self):
        nl = mp.Nonlinearity(lambda t: np.asarray(t) + 1.0, lambda t: np.asarray(t) ** 2 / 2 + t)
        with pytest.raises(ValueError):
            nl.validate()

    def test_wrong_antiderivative(self):
        nl = mp.Nonlinearity(lambda t: np.asarray(t) ** 3, lambda t: np.asarray(t) ** 4 / 2)
        with pytest.raises(ValueError, match="F'"):
            nl.validate()
