"""Command-line driver: ``conjugate``, ``audit``, ``solve`` and ``diagnose``.

Problem files are line oriented::

    # comment
    section.key = value

Sections are ``phi``, ``n_func``, ``f``, ``v``, ``domain`` and ``solver``;
lists are comma separated.  Every physics key must be given; only the
``solver`` section has defaults.  Machine-readable output goes to files in
``--out``; stdout carries a short human summary.

Exit codes: 0 success, 1 audit failure, 2 (Phi0)/(Phi1) failure in
``conjugate``, 3 solver hit ``max_iter``, 4 solver degenerated to zero,
64 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import conjugation as cj
from . import mountain_pass as mp
from .rearrangement import compute_phi_circ, phi_circ_power
from .spaces import DomainSpec, Field, dump_field, load_field
from .young import GFunction, ScalarFunction, Verdict, growth_indices

EXIT_OK, EXIT_AUDIT, EXIT_CONJ, EXIT_MAXITER, EXIT_DEGENERATE, EXIT_USAGE = 0, 1, 2, 3, 4, 64

# key -> (type, required); types: int, float, str, floats (list), num_or_pbar
SCHEMA = {
    "phi.kind": ("str", True),
    "phi.exponents": ("floats", True),
    "phi.coefficients": ("floats", True),
    "n_func.kind": ("str", True),
    "n_func.exponent": ("num_or_pbar", True),
    "n_func.scale": ("float", True),
    "f.kind": ("str", True),
    "f.exponent": ("float", False),
    "f.coefficient": ("float", False),
    "f.theta": ("float", True),
    "v.kind": ("str", True),
    "v.value": ("float", True),
    "v.amplitude": ("float", False),
    "v.period": ("float", True),
    "domain.n": ("int", True),
    "domain.L": ("float", True),
    "domain.m": ("int", True),
    "domain.boundary": ("str", True),
    "solver.path_points": ("int", False),
    "solver.step": ("float", False),
    "solver.tol": ("float", False),
    "solver.max_iter": ("int", False),
    "solver.keep_every": ("int", False),
    "solver.seed_radius": ("float", False),
    "solver.seed": ("int", False),
    "solver.concentration_radius": ("float", False),
}

SOLVER_DEFAULTS = {
    "solver.path_points": 21,
    "solver.step": 0.1,
    "solver.tol": 1e-4,
    "solver.max_iter": 2000,
    "solver.keep_every": 10,
    "solver.seed_radius": 3.0,
    "solver.seed": 0,
    "solver.concentration_radius": 1.0,
}

CONJUGATE_KEYS = ("phi.kind", "phi.exponents", "phi.coefficients", "domain.n")


class ConfigError(ValueError):
    pass


def _convert(key, kind, raw, where):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "floats":
            vals = tuple(float(x) for x in raw.split(","))
            if not vals:
                raise ValueError
            return vals
        if kind == "num_or_pbar":
            return "pbar" if raw.strip() == "pbar" else float(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{where}: bad value {raw!r} for {key} (expected {kind})") from None


@dataclass(frozen=True)
class ProblemConfig:
    """Validated key/value view of a problem file."""

    values: tuple  # sorted (key, value) pairs

    def get(self, key, default=None):
        return dict(self.values).get(key, default)

    def __contains__(self, key):
        return key in dict(self.values)

    def with_overrides(self, overrides):
        d = dict(self.values)
        for i, item in enumerate(overrides):
            if "=" not in item:
                raise ConfigError(f"override {i + 1}: expected key=value, got {item!r}")
            k, v = (s.strip() for s in item.split("=", 1))
            if k not in SCHEMA:
                raise ConfigError(f"override {i + 1}: unknown key {k!r}")
            d[k] = _convert(k, SCHEMA[k][0], v, f"override {i + 1}")
        return ProblemConfig(tuple(sorted(d.items())))


def parse_problem_text(text, source="<text>"):
    d = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        where = f"{source}:{lineno}"
        if "=" not in body:
            raise ConfigError(f"{where}: expected 'section.key = value'")
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in d:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        d[key] = _convert(key, SCHEMA[key][0], raw, where)
    return ProblemConfig(tuple(sorted(d.items())))


def parse_problem_file(path) -> ProblemConfig:
    path = Path(path)
    return parse_problem_text(path.read_text(), str(path))


def _fmt(v):
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_problem(cfg: ProblemConfig) -> str:
    lines = []
    section = None
    for k, v in cfg.values:
        sec = k.split(".", 1)[0]
        if section is not None and sec != section:
            lines.append("")
        section = sec
        lines.append(f"{k} = {_fmt(v)}")
    return "\n".join(lines) + "\n"


def _require(cfg, keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")


def build_phi(cfg) -> GFunction:
    _require(cfg, CONJUGATE_KEYS)
    if cfg.get("phi.kind") != "power_sum":
        raise ConfigError("phi.kind must be power_sum")
    p, a = cfg.get("phi.exponents"), cfg.get("phi.coefficients")
    n = cfg.get("domain.n")
    if len(p) != n or len(a) != n:
        raise ConfigError(f"phi.exponents and phi.coefficients need domain.n = {n} entries")
    if n < 2:
        raise ConfigError("domain.n must be >= 2")
    return GFunction.power_sum(p, a)


def build_spec(cfg: ProblemConfig) -> mp.ProblemSpec:
    required = [k for k, (_, req) in SCHEMA.items() if req]
    _require(cfg, required)
    phi = build_phi(cfg)
    n = phi.n
    if cfg.get("n_func.kind") != "power":
        raise ConfigError("n_func.kind must be power")
    q = cfg.get("n_func.exponent")
    if q == "pbar":
        q = float(cj.power_sum_conjugate_exponent(phi.exponents, n).p_bar)
    N = ScalarFunction.power(q, cfg.get("n_func.scale"))

    fk = cfg.get("f.kind")
    if fk == "power":
        _require(cfg, ["f.exponent", "f.coefficient"])
        f = mp.Nonlinearity.power(cfg.get("f.exponent"), cfg.get("f.coefficient"))
    elif fk == "zero":
        f = mp.Nonlinearity.zero()
    else:
        raise ConfigError("f.kind must be power or zero")
    f.validate()

    vk = cfg.get("v.kind")
    if vk == "constant":
        V = mp.Potential.constant(n, cfg.get("v.value"), cfg.get("v.period"))
    elif vk == "cosine_product":
        _require(cfg, ["v.amplitude"])
        V = mp.Potential.cosine_product(n, cfg.get("v.value"), cfg.get("v.amplitude"),
                                        cfg.get("v.period"))
    else:
        raise ConfigError("v.kind must be constant or cosine_product")

    try:
        dom = DomainSpec(n, cfg.get("domain.L"), cfg.get("domain.m"), cfg.get("domain.boundary"))
    except ValueError as e:
        raise ConfigError(f"domain: {e}") from None

    theta = cfg.get("f.theta")
    s_phi = growth_indices(phi).s
    if not theta > s_phi:
        raise ConfigError(f"(f3) requires theta>s_Phi (theta={theta:g}, s_Phi={s_phi:g})")
    return mp.ProblemSpec(phi, N, V, f, theta, dom, seed=_solver(cfg, "solver.seed"))


def _solver(cfg, key):
    return cfg.get(key, SOLVER_DEFAULTS[key])


def solver_options(cfg) -> mp.MPOptions:
    return mp.MPOptions(
        path_points=_solver(cfg, "solver.path_points"),
        step=_solver(cfg, "solver.step"),
        tol=_solver(cfg, "solver.tol"),
        max_iter=_solver(cfg, "solver.max_iter"),
        keep_every=_solver(cfg, "solver.keep_every"),
        seed_radius=_solver(cfg, "solver.seed_radius"),
    )


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def write_json(path, obj):
    Path(path).write_text(mp.dumps(obj))


def write_table(path, header, cols):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([f"{x:.17g}" for x in row])


def _fit_slope(t, y):
    lt, ly = np.log(t), np.log(y)
    return float(np.polyfit(lt, ly, 1)[0])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_conjugate(cfg: ProblemConfig, out: Path):
    phi = build_phi(cfg)
    n = phi.n
    exps = cj.power_sum_conjugate_exponent(phi.exponents, n)
    phi_circ = compute_phi_circ(phi)
    write_table(out / "phi_circ.csv", ["r", "phi_circ"], [phi_circ.t, phi_circ.y])
    # exact exponent arithmetic decides the borderline p_bar = n for power sums
    exact = phi_circ_power(phi) if phi.kind == "power_sum" else phi_circ
    integ = cj.check_integrability(exact, n)
    rep = {
        "n": n,
        "exponents": list(phi.exponents),
        "p_bar": str(exps.p_bar),
        "p_bar_float": float(exps.p_bar),
        "p_star": str(exps.p_star) if exps.finite else "inf",
        "p_star_float": float(exps.p_star) if exps.finite else math.inf,
        "phi_circ_slope": _fit_slope(phi_circ.t, phi_circ.y),
        "phi0": str(integ.phi0),
        "phi0_integral_0_1": integ.phi0_value,
        "phi1": str(integ.phi1),
    }
    code = EXIT_OK
    if integ.phi0 == Verdict.PASS and integ.phi1 == Verdict.PASS:
        phi_n = cj.compute_phi_n(phi_circ, n)
        write_table(out / "phi_n.csv", ["t", "phi_n"], [phi_n.t, phi_n.y])
        r = np.geomspace(1e-1, 1e2, 61)
        rep["phi_n_slope"] = _fit_slope(r, phi_n.value(r))
        v2, dom = cj.check_phi2(phi, phi_n)
        rep["phi2"] = str(v2)
        rep["phi2_detail"] = dom.as_dict()
    else:
        rep["phi_n_slope"] = None
        rep["phi2"] = "INCONCLUSIVE"
        code = EXIT_CONJ
    write_json(out / "exponents.json", rep)
    print(f"p_bar = {exps.p_bar}  p_bar* = {rep['p_star']}  "
          f"phi_n slope = {rep['phi_n_slope']}  Phi0 {rep['phi0']}  Phi1 {rep['phi1']}  "
          f"Phi2 {rep['phi2']}")
    return code


def _audit(spec):
    return mp.audit_assumptions(spec)


def cmd_audit(cfg: ProblemConfig, out: Path):
    spec = build_spec(cfg)
    audit = _audit(spec)
    write_json(out / "audit.json", {k: v.as_dict() for k, v in audit.items()})
    for k, v in audit.items():
        print(f"{k:8s} {v.verdict}")
    return EXIT_OK if mp.all_pass(audit) else EXIT_AUDIT


def _exit_for(verdict):
    return {"converged": EXIT_OK, "max_iter": EXIT_MAXITER,
            "degenerate_to_zero": EXIT_DEGENERATE}[verdict]


def _run_solver(cfg, spec, audit, force):
    opts = solver_options(cfg)
    try:
        result = mp.mountain_pass_solve(spec, opts)
    except ValueError as e:
        if "no valley" not in str(e):
            raise
        zero = Field(spec.domain, np.zeros(spec.domain.shape))
        result = mp.MPResult(zero, 0.0, [], "degenerate_to_zero", 0.0, [], 0.0)
        return result, {"failure": str(e)}
    return result, {}


def _diagnostics(cfg, spec, u: Field):
    r = _solver(cfg, "solver.concentration_radius")
    value, center = mp.concentration_functional(u, r, spec.N)
    diag = {"concentration": {"radius": r, "value": value, "center": center}}
    if spec.domain.boundary == "periodic":
        per = np.asarray(spec.V.period)
        lattice_center = np.round(center / per) * per
        steps = lattice_center / spec.domain.h
        if np.all(np.abs(steps - np.round(steps)) < 1e-9):
            w = mp.recenter(u, lattice_center, spec.V.period)
            e0, e1 = mp.energy(spec, u), mp.energy(spec, w)
            v1, _ = mp.concentration_functional(w, r, spec.N)
            diag["recentering"] = {"shift": lattice_center, "energy_before": e0,
                                   "energy_after": e1, "energy_difference": abs(e1 - e0),
                                   "concentration_after": v1}
            return diag, w
    return diag, None


def cmd_solve(cfg: ProblemConfig, out: Path, force=False):
    spec = build_spec(cfg)
    audit = _audit(spec)
    ok = mp.all_pass(audit)
    if not ok and not force:
        write_json(out / "audit.json", {k: v.as_dict() for k, v in audit.items()})
        failed = [k for k, v in audit.items() if v.verdict != Verdict.PASS]
        print(f"audit failed ({', '.join(failed)}); rerun with --force to solve anyway")
        return EXIT_AUDIT
    result, extra = _run_solver(cfg, spec, audit, force)
    ps = mp.ps_monitor(spec, result.iterates) if result.iterates else []
    extra["forced"] = bool(force and not ok)
    if result.iterates:
        diag, _ = _diagnostics(cfg, spec, result.u_star)
        extra["diagnostics"] = diag
    rep = mp.solve_report(spec, result, audit, ps, extra)
    write_json(out / "solve_report.json", rep)
    dump_field(result.u_star, out / "u_star.csv")
    print(f"verdict {result.verdict}  c_est {result.c_est:.10g}  residual {result.residual:.3g}  "
          f"iterations {len(result.history) - 1}")
    return _exit_for(result.verdict)


def cmd_diagnose(cfg: ProblemConfig, out: Path, field_path: Optional[str] = None, force=False):
    spec = build_spec(cfg)
    if field_path is not None:
        u = load_field(field_path, spec.domain.boundary)
        if u.domain != spec.domain:
            raise ConfigError("field grid does not match the problem domain")
        code = EXIT_OK
    else:
        result, _ = _run_solver(cfg, spec, None, force)
        u = result.u_star
        code = _exit_for(result.verdict)
    diag, w = _diagnostics(cfg, spec, u)
    ps = mp.ps_monitor(spec, [u])[0]
    diag["ps_monitor"] = ps.as_dict()
    diag["energy"] = mp.energy(spec, u)
    write_json(out / "diagnostics.json", diag)
    if w is not None:
        dump_field(w, out / "recentered.csv")
    c = diag["concentration"]
    print(f"concentration {c['value']:.6g} at {np.asarray(c['center']).tolist()}  "
          f"J {diag['energy']:.10g}")
    return code


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="anisorlicz", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("conjugate", "build phi_circ and phi_n tables"),
                        ("audit", "check every standing hypothesis"),
                        ("solve", "run the mountain-pass solver"),
                        ("diagnose", "concentration scan and recentering")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("problem", help="problem file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
        sp.add_argument("--force", action="store_true", help="solve even if the audit fails")
        if name == "diagnose":
            sp.add_argument("--field", help="CSV field to analyse instead of solving")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        cfg = parse_problem_file(args.problem).with_overrides(args.override)
        if args.command == "conjugate":
            return cmd_conjugate(cfg, out)
        if args.command == "audit":
            return cmd_audit(cfg, out)
        if args.command == "solve":
            return cmd_solve(cfg, out, force=args.force)
        return cmd_diagnose(cfg, out, args.field, force=args.force)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
