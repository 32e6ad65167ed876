import numpy as np
import pytest

from anisorlicz.conjugation import compute_phi_n
from anisorlicz.rearrangement import compute_phi_circ
from anisorlicz.spaces import (
    DomainSpec,
    Field,
    VectorField,
    bump,
    divergence_adjoint,
    dump_field,
    gradient_field,
    load_field,
    luxemburg_norm,
    modular,
    random_bump_sum,
    sobolev_norm,
    verify_modular_norm_bounds,
    verify_sobolev_inequality,
)
from anisorlicz.young import GFunction, GrowthIndices, ScalarFunction, conjugate_scalar, growth_indices

SQ = ScalarFunction.power(2.0)


def unit_box(n=2, m=8, boundary="periodic"):
    return DomainSpec(n, 0.5, m, boundary)  # volume 1


class TestDomain:
    def test_spacing_and_nodes(self):
        d = DomainSpec(3, 8.0, 32)
        assert d.h == 0.5 and d.shape == (32, 32, 32)
        assert d.axis()[0] == -8.0 and d.axis()[-1] == 7.5

    @pytest.mark.parametrize("kw", [dict(m=4), dict(L=0.0), dict(boundary="neumann")])
    def test_invalid(self, kw):
        args = dict(n=2, L=1.0, m=8, boundary="periodic")
        args.update(kw)
        with pytest.raises(ValueError):
            DomainSpec(**args)

    def test_dirichlet_pins_first_layer(self):
        d = DomainSpec(2, 1.0, 8, "zero_dirichlet")
        u = Field(d, np.ones(d.shape))
        assert np.all(u.values[0, :] == 0) and np.all(u.values[:, 0] == 0)
        assert u.values[1:, 1:].min() == 1.0

    def test_non_finite_rejected(self):
        d = unit_box()
        bad = np.zeros(d.shape)
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            Field(d, bad)


class TestGradient:
    def test_constant(self):
        d = unit_box(3)
        g = gradient_field(Field(d, np.full(d.shape, 4.2)))
        assert np.all(g.values == 0)

    def test_linear_interior(self):
        d = DomainSpec(2, 1.0, 16, "zero_dirichlet")
        x = d.coordinates()
        g = gradient_field(Field(d, x[..., 0])).values[..., 0]
        np.testing.assert_allclose(g[1:-1, 1:], 1.0, rtol=1e-12)

    def test_periodic_sine_first_order(self):
        errs = []
        for m in (32, 64):
            d = DomainSpec(2, 2.0, m)
            x = d.coordinates()
            k = np.pi / d.L
            g = gradient_field(Field(d, np.sin(k * x[..., 0]))).values[..., 0]
            errs.append(np.abs(g - k * np.cos(k * x[..., 0])).max())
            assert errs[-1] <= 0.5 * k * k * d.h * 1.01
        assert errs[1] < 0.6 * errs[0]

    @pytest.mark.parametrize("boundary", ["periodic", "zero_dirichlet"])
    def test_adjoint(self, boundary):
        rng = np.random.default_rng(0)
        d = DomainSpec(3, 1.0, 10, boundary)
        u = Field(d, rng.normal(size=d.shape))
        q = VectorField(d, rng.normal(size=d.shape + (3,)))
        lhs = np.sum(gradient_field(u).values * q.values)
        rhs = np.sum(divergence_adjoint(q).values * u.values)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestModular:
    def test_zero(self):
        d = unit_box()
        assert modular(SQ, Field.zeros(d)) == 0.0

    def test_constant_on_unit_volume(self):
        d = unit_box()
        assert modular(SQ, Field(d, np.full(d.shape, 3.0))) == pytest.approx(9.0)

    def test_vector_constant(self):
        d = DomainSpec(2, 1.5, 12)  # volume 9
        w = VectorField(d, np.ones(d.shape + (2,)))
        assert modular(GFunction.power_sum([2, 2]), w) == pytest.approx(18.0)

    def test_positive_off_zero(self):
        d = unit_box()
        v = np.zeros(d.shape)
        v[3, 4] = 1e-3
        assert modular(SQ, Field(d, v)) > 0


class TestLuxemburg:
    def test_quadratic_constant(self):
        d = unit_box()
        assert luxemburg_norm(SQ, Field(d, np.full(d.shape, 2.5))) == pytest.approx(2.5, rel=1e-8)

    def test_zero(self):
        assert luxemburg_norm(SQ, Field.zeros(unit_box())) == 0.0

    def test_quartic_on_volume_sixteen(self):
        d = DomainSpec(2, 2.0, 16)
        c = 1.7
        nrm = luxemburg_norm(ScalarFunction.power(4.0), Field(d, np.full(d.shape, c)))
        assert nrm == pytest.approx(2 * c, rel=1e-8)

    def test_extreme_exponent(self):
        d = unit_box()
        nrm = luxemburg_norm(ScalarFunction.power(21.0), Field(d, np.full(d.shape, 1e3)))
        assert nrm == pytest.approx(1e3, rel=1e-8)

    def test_homogeneous(self):
        rng = np.random.default_rng(1)
        d = DomainSpec(2, 1.0, 16)
        phi = GFunction.power_sum([2, 7])
        w = VectorField(d, rng.normal(size=d.shape + (2,)))
        base = luxemburg_norm(phi, w)
        for lam in (-3.0, 0.01, 250.0):
            assert luxemburg_norm(phi, w * lam) == pytest.approx(abs(lam) * base, rel=1e-8)

    def test_generic_path_matches_fast_path(self):
        rng = np.random.default_rng(2)
        d = DomainSpec(2, 1.0, 16)
        ps = GFunction.power_sum([2, 7])
        cb = GFunction.from_callable(2, ps.value, ps.gradient)
        w = VectorField(d, rng.normal(size=d.shape + (2,)))
        assert luxemburg_norm(cb, w) == pytest.approx(luxemburg_norm(ps, w), rel=1e-8)

    def test_unit_ball_characterization(self):
        rng = np.random.default_rng(3)
        d = DomainSpec(2, 1.0, 12)
        phi = GFunction.power_sum([2, 7])
        for _ in range(50):
            w = VectorField(d, rng.normal(size=d.shape + (2,)) * 10 ** rng.uniform(-1, 0.5))
            assert (luxemburg_norm(phi, w) <= 1) == (modular(phi, w) <= 1)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(4)
        d = DomainSpec(2, 1.0, 12)
        phi = GFunction.power_sum([1.8, 3.0])
        for _ in range(30):
            a = VectorField(d, rng.normal(size=d.shape + (2,)))
            b = VectorField(d, 3 * rng.normal(size=d.shape + (2,)))
            assert luxemburg_norm(phi, a + b) <= (luxemburg_norm(phi, a) + luxemburg_norm(phi, b)) * (1 + 1e-8)

    def test_holder_pairing(self):
        rng = np.random.default_rng(5)
        d = DomainSpec(2, 1.0, 12)
        N = ScalarFunction.power(3.0)
        Nc = conjugate_scalar(N)
        for _ in range(30):
            w = Field(d, rng.normal(size=d.shape))
            z = Field(d, rng.normal(size=d.shape) * 5)
            assert abs(w.inner(z)) <= 2 * luxemburg_norm(N, w) * luxemburg_norm(Nc, z)

    def test_norm_and_modular_converge_together(self):
        rng = np.random.default_rng(6)
        d = DomainSpec(2, 1.0, 12)
        N = ScalarFunction.power(3.0)
        w = Field(d, rng.normal(size=d.shape))
        pert = Field(d, rng.normal(size=d.shape))
        norms = [luxemburg_norm(N, pert * (2.0 ** -k)) for k in range(12)]
        mods = [modular(N, pert * (2.0 ** -k)) for k in range(12)]
        assert np.all(np.diff(norms) < 0) and np.all(np.diff(mods) < 0)
        assert norms[-1] < 1e-3 and mods[-1] < 1e-9
        assert luxemburg_norm(N, (w + pert * 1e-6) - w) < 1e-5


class TestSobolevNorm:
    def test_zero(self):
        r = sobolev_norm(GFunction.power_sum([2, 2]), SQ, Field.zeros(unit_box()))
        assert (r.grad_part, r.zero_order_part, r.total) == (0.0, 0.0, 0.0)

    def test_scaling(self):
        d = DomainSpec(2, 2.0, 32)
        u = bump(d, radius=1.5)
        phi, N = GFunction.power_sum([1.8, 2.2]), ScalarFunction.power(2.0)
        assert sobolev_norm(phi, N, u * 2).total == pytest.approx(2 * sobolev_norm(phi, N, u).total,
                                                                  rel=1e-6)

    def test_refinement(self):
        phi, N = GFunction.power_sum([2, 2]), SQ
        vals = []
        for m in (32, 128):
            d = DomainSpec(2, 2.0, m, "zero_dirichlet")
            r = np.linalg.norm(d.coordinates(), axis=-1)
            vals.append(sobolev_norm(phi, N, Field(d, np.clip(1 - r / d.L, 0, None))).total)
        assert vals[0] == pytest.approx(vals[1], rel=0.05)


class TestModularNormBounds:
    def test_quadratic_is_tight(self):
        rng = np.random.default_rng(0)
        d = unit_box(2, 16)
        for _ in range(5):
            r = verify_modular_norm_bounds(SQ, Field(d, rng.normal(size=d.shape) * 3), GrowthIndices(2, 2))
            assert r.lower == pytest.approx(r.modular, rel=1e-6)
            assert r.upper == pytest.approx(r.modular, rel=1e-6)

    def test_zero(self):
        r = verify_modular_norm_bounds(SQ, Field.zeros(unit_box()), GrowthIndices(2, 2))
        assert (r.lower, r.modular, r.upper) == (0.0, 0.0, 0.0)
        assert r.lower_ok and r.upper_ok

    def test_mixed_powers_random_fields(self):
        rng = np.random.default_rng(12)
        d = DomainSpec(2, 1.0, 16)
        phi = GFunction.power_sum([2, 7])
        idx = growth_indices(phi)
        for _ in range(100):
            w = VectorField(d, rng.normal(size=d.shape + (2,)) * 10 ** rng.uniform(-2, 1))
            r = verify_modular_norm_bounds(phi, w, idx)
            assert r.lower_ok and r.upper_ok


class TestSobolevInequality:
    def test_zero_ratio(self):
        d = DomainSpec(3, 2.0, 8, "zero_dirichlet")
        phi = GFunction.power_sum([2, 2, 2])
        rep = verify_sobolev_inequality(phi, compute_phi_n(ScalarFunction.power(2.0), 3), [Field.zeros(d)])
        assert rep.ratios.tolist() == [0.0]

    def test_single_bump_refinement(self):
        phi = GFunction.power_sum([2, 2, 2])
        pn = compute_phi_n(compute_phi_circ(phi), 3)
        ratios = []
        for m in (16, 32):
            d = DomainSpec(3, 3.0, m, "zero_dirichlet")
            ratios.append(verify_sobolev_inequality(phi, pn, [bump(d, radius=2.0)]).K_est)
        assert np.isfinite(ratios).all()
        assert ratios[1] == pytest.approx(ratios[0], rel=0.1)

    def test_integral_form_at_twice_the_estimate(self):
        phi = GFunction.power_sum([1.8, 2, 2.2])
        pn = compute_phi_n(compute_phi_circ(phi), 3)
        d = DomainSpec(3, 4.0, 16, "zero_dirichlet")
        rng = np.random.default_rng(0)
        fam = [random_bump_sum(d, rng) for _ in range(20)]
        rep = verify_sobolev_inequality(phi, pn, fam)
        assert np.isfinite(rep.K_est) and rep.K_est > 0
        twice = verify_sobolev_inequality(phi, pn, fam, K_grid=[2 * rep.K_est])
        assert twice.K_integral == pytest.approx(2 * rep.K_est)


class TestFieldIO:
    @pytest.mark.parametrize("boundary", ["periodic", "zero_dirichlet"])
    def test_round_trip_is_bit_exact(self, tmp_path, boundary):
        rng = np.random.default_rng(9)
        d = DomainSpec(3, 2.5, 8, boundary)
        u = Field(d, rng.normal(size=d.shape) * np.exp(rng.uniform(-30, 30, size=d.shape)))
        path = tmp_path / "u.csv"
        dump_field(u, path)
        v = load_field(path, boundary)
        assert v.domain == d
        assert np.array_equal(u.values, v.values)

    def test_layout(self, tmp_path):
        d = DomainSpec(2, 1.0, 8)
        u = Field(d, np.arange(64, dtype=float).reshape(8, 8))
        dump_field(u, tmp_path / "u.csv")
        lines = (tmp_path / "u.csv").read_text().splitlines()
        assert lines[0] == "x1,x2,value"
        assert lines[1] == "-1,-1,0" and lines[2] == "-1,-0.75,1"
        assert len(lines) == 65

    def test_bad_header(self, tmp_path):
        (tmp_path / "bad.csv").write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            load_field(tmp_path / "bad.csv")
