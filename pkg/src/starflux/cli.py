"""Command-line front end.

Exit codes: 0 when every exact check passes, 1 for usage or configuration
errors, 2 when a mathematical check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction

from .acceptance import DEFAULT_SEED, random_fun, run_acceptance
from .dynamics import AutPath, probe_modes
from .equivalence import EquivalenceOperator, check_flux_invariance
from .errors import StarfluxError
from .fedosov import FedosovData, FedosovProduct
from .flux import classical_flux, flux_def_closed_form, flux_def_of_loop
from .formal import FormalScalar, GaussQ
from .star import MoyalProduct, check_associativity, extract_cochain
from .torus import H1Class, TorusFun
from .weyl import SymplecticConnection

EXIT_OK, EXIT_USAGE, EXIT_MATH = 0, 1, 2


class UsageError(Exception):
    """Malformed flags or configuration."""


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

@dataclass
class EngineConfig:
    """Settings shared by the subcommands.

    ``omega`` lists the coefficients ``C_1, C_2, ...`` of
    ``Omega = sum nu^i C_i dtheta_1 ^ dtheta_2``; ``christoffel`` maps
    ``"l,i,j"`` to the totally symmetric lowered symbols (empty means flat).
    """

    dim: int = 2
    K: int = 3
    D_max: int | None = None
    omega: list = field(default_factory=list)
    christoffel: dict = field(default_factory=dict)
    probe_bound: int = 2
    output: str = "text"

    def validate(self) -> "EngineConfig":
        if self.K < 1:
            raise UsageError("K must be at least 1")
        if self.dim < 2 or self.dim % 2:
            raise UsageError("dim must be a positive even number")
        if len(self.omega) > self.K:
            raise UsageError(f"Omega has {len(self.omega)} coefficients but K={self.K}")
        if self.output not in ("json", "csv", "text"):
            raise UsageError("output must be json, csv or text")
        if self.D_max is not None and self.D_max < 3:
            raise UsageError("D_max must be at least 3")
        return self

    def connection(self):
        if not self.christoffel:
            return None
        low = {}
        for key, val in self.christoffel.items():
            idx = tuple(int(x) for x in str(key).split(","))
            if len(idx) != 3 or not all(0 <= i < self.dim for i in idx):
                raise UsageError(f"bad Christoffel index {key!r}")
            low[idx] = parse_rational(val)
        return SymplecticConnection.from_lowered(low, self.dim)

    def fedosov_data(self) -> FedosovData:
        return FedosovData(self.connection(), self.omega or None, self.dim, self.K, self.D_max)

    def fedosov_product(self) -> FedosovProduct:
        return FedosovProduct(self.dim, self.K, self.connection(), self.omega or None, self.D_max)


def parse_rational(x) -> Fraction:
    if isinstance(x, list) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    try:
        return Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {x!r}") from exc


def parse_vector(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"not an integer vector: {text!r}") from exc


def parse_modes(text: str) -> list:
    """``"1,0;0,1"`` to ``[(1, 0), (0, 1)]``; the empty string gives no modes."""
    text = text.strip()
    return [parse_vector(part) for part in text.split(";") if part.strip()] if text else []


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def load_config(args) -> EngineConfig:
    cfg = EngineConfig()
    if getattr(args, "config", None):
        data = _read_json(args.config)
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(EngineConfig)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for k, v in data.items():
            setattr(cfg, k, v)
    if getattr(args, "K", None) is not None:
        cfg.K = args.K
    if getattr(args, "dim", None) is not None:
        cfg.dim = args.dim
    if getattr(args, "D_max", None) is not None:
        cfg.D_max = args.D_max
    if getattr(args, "omega", None) is not None:
        cfg.omega = [x for x in args.omega.split(",") if x.strip()]
    if getattr(args, "probe_bound", None) is not None:
        cfg.probe_bound = args.probe_bound
    if getattr(args, "json", False):
        cfg.output = "json"
    try:
        cfg.K = int(cfg.K)
        cfg.dim = int(cfg.dim)
        cfg.probe_bound = int(cfg.probe_bound)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad integer in configuration: {exc}") from exc
    cfg.omega = [parse_rational(c) for c in cfg.omega]
    return cfg.validate()


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------

def gq_json(a: GaussQ) -> dict:
    return a.to_pairs()


def series_json(s: FormalScalar) -> list:
    return [gq_json(a) for a in s.c]


def class_json(c: H1Class) -> list:
    return [series_json(p) for p in c.periods]


def _gq_text(a: GaussQ) -> str:
    if not a.im:
        return str(Fraction(int(a.re.numerator), int(a.re.denominator)))
    return repr(a)


def series_text(s: FormalScalar) -> str:
    parts = []
    for k, a in enumerate(s.c):
        if not a:
            continue
        coeff = _gq_text(a)
        if k == 0:
            parts.append(coeff)
        else:
            nu = "nu" if k == 1 else f"nu^{k}"
            parts.append(nu if coeff == "1" else f"-{nu}" if coeff == "-1" else f"{coeff}*{nu}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def class_text(c: H1Class) -> str:
    return "(" + ", ".join(series_text(p) for p in c.periods) + ")"


def _emit(obj, cfg: EngineConfig, text: str, out):
    if cfg.output == "json":
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def _product(name: str, cfg: EngineConfig):
    if name == "moyal":
        return MoyalProduct(cfg.dim, cfg.K)
    if name == "fedosov":
        return cfg.fedosov_product()
    raise UsageError(f"unknown product {name!r}")


def cmd_associativity_check(args, cfg, out) -> int:
    P = _product(args.product, cfg)
    rng = random.Random(args.seed)
    bad = 0
    for _ in range(args.trials):
        F, G, H = (random_fun(rng, cfg.dim, cfg.K, 2, 2) for _ in range(3))
        if check_associativity(P, F, G, H):
            bad += 1
    ok = bad == 0
    _emit({"product": args.product, "trials": args.trials, "seed": args.seed, "failures": bad, "pass": ok},
          cfg, f"{args.product}: {args.trials} triples, {bad} non-associative", out)
    return EXIT_OK if ok else EXIT_MATH


def cmd_star_table(args, cfg, out) -> int:
    P = _product(args.product, cfg)
    modes = parse_modes(args.modes)
    orders = range(0, cfg.K + 1) if args.orders is None else [int(r) for r in args.orders.split(",")]
    cochains = {r: extract_cochain(P, r) for r in orders}
    rows = []
    for m in modes:
        for n in modes:
            F, G = TorusFun.mode(m, 1, cfg.K), TorusFun.mode(n, 1, cfg.K)
            for r, C in cochains.items():
                val = C(F, G)
                rows.append({"m": list(m), "n": list(n), "r": r,
                             "value": [{"mode": list(k), "coeff": gq_json(s.c[0])}
                                       for k, s in sorted(val.modes.items())]})
    lines = []
    for row in rows:
        terms = " + ".join(f"({_gq_text(GaussQ.from_pairs(t['coeff']))}) e{tuple(t['mode'])}"
                           for t in row["value"]) or "0"
        lines.append(f"C_{row['r']}(e{tuple(row['m'])}, e{tuple(row['n'])}) = {terms}")
    _emit({"product": args.product, "table": rows}, cfg, "\n".join(lines) or "(empty table)", out)
    return EXIT_OK


def cmd_fedosov_vs_moyal(args, cfg, out) -> int:
    if cfg.omega or cfg.christoffel:
        raise UsageError("the oracle gate compares the flat, Omega = 0 product with Moyal")
    F = FedosovProduct(cfg.dim, cfg.K)
    M = MoyalProduct(cfg.dim, cfg.K)
    modes = list(probe_modes(cfg.dim, args.modes))
    bad = []
    for m in modes:
        for n in modes:
            if F.pair(m, n) != M.pair(m, n):
                bad.append([list(m), list(n)])
    ok = not bad
    _emit({"pairs": len(modes) ** 2, "mismatches": bad, "residual_zero": ok}, cfg,
          f"{len(modes) ** 2} mode pairs through nu^{cfg.K}: {len(bad)} mismatches", out)
    return EXIT_OK if ok else EXIT_MATH


def cmd_flux_rotation(args, cfg, out) -> int:
    v = parse_vector(args.v)
    if len(v) != cfg.dim:
        raise UsageError(f"--v needs {cfg.dim} components")
    data = cfg.fedosov_data()
    cl = classical_flux(v, cfg.K)
    de = flux_def_of_loop(v, data)
    cf = flux_def_closed_form(v, data)
    ok = de == cf
    _emit({"classical": class_json(cl), "deformed": class_json(de), "closed_form": class_json(cf), "match": ok},
          cfg, f"classical   {class_text(cl)}\ndeformed    {class_text(de)}\n"
               f"closed form {class_text(cf)}\nmatch       {ok}", out)
    return EXIT_OK if ok else EXIT_MATH


def cmd_gamma_table(args, cfg, out) -> int:
    sweep = _read_json(args.omega_sweep)
    if isinstance(sweep, dict):
        sweep = sweep.get("omega", [])
    if not isinstance(sweep, list):
        raise UsageError("the sweep file must hold a list of Omega coefficient lists")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "loop"] + [f"period_{i + 1}" for i in range(cfg.dim)])
    rows = []
    for entry in sweep:
        cfg_i = EngineConfig(**{**cfg.__dict__, "omega": [parse_rational(c) for c in entry]}).validate()
        data = cfg_i.fedosov_data()
        for k in range(cfg.dim):
            v = tuple(int(i == k) for i in range(cfg.dim))
            g = flux_def_of_loop(v, data)
            label = ";".join(str(c) for c in cfg_i.omega)
            w.writerow([label, ",".join(map(str, v))] + [series_text(p) for p in g.periods])
            rows.append({"omega": [[c.numerator, c.denominator] for c in cfg_i.omega],
                         "loop": list(v), "generator": class_json(g)})
    if cfg.output == "json":
        out.write(json.dumps({"rows": rows}, sort_keys=True) + "\n")
    else:
        out.write(buf.getvalue())
    return EXIT_OK


def cmd_heisenberg_demo(args, cfg, out) -> int:
    data = _read_json(args.H) if not args.H.lstrip().startswith("{") else json.loads(args.H)
    try:
        H = TorusFun.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed Hamiltonian: {exc}") from exc
    if H.dim != cfg.dim:
        raise UsageError("Hamiltonian lives on a torus of another dimension")
    H = H.with_order(cfg.K)
    P = _product(args.product, cfg)
    A = AutPath.hamiltonian({0: H}, P).endpoint()
    rows, lines = [], []
    for m in probe_modes(cfg.dim, cfg.probe_bound):
        img = A(TorusFun.mode(m, 1, cfg.K))
        rows.append({"probe": list(m), "image": img.to_json()})
        terms = " + ".join(f"({series_text(s)}) e{k}" for k, s in sorted(img.modes.items())) or "0"
        lines.append(f"A_1 e{m} = {terms}")
    _emit({"probes": rows}, cfg, "\n".join(lines), out)
    return EXIT_OK


def cmd_equiv_check(args, cfg, out) -> int:
    data = _read_json(args.T)
    if isinstance(data, dict):
        data = {"dim": cfg.dim, "K": cfg.K, **data}
    T = EquivalenceOperator.from_json(data).with_order(cfg.K)
    v = parse_vector(args.loop)
    if len(v) != cfg.dim:
        raise UsageError(f"--loop needs {cfg.dim} components")
    P = _product(args.product, cfg)
    before, after = check_flux_invariance(v, P, T)
    ok = before == after
    _emit({"flux": class_json(before), "flux_transported": class_json(after), "match": ok}, cfg,
          f"flux             {class_text(before)}\nflux transported {class_text(after)}\nmatch            {ok}",
          out)
    return EXIT_OK if ok else EXIT_MATH


def cmd_acceptance(args, cfg, out) -> int:
    which = None if args.criteria is None else [int(x) for x in args.criteria.split(",")]
    results = run_acceptance(cfg.K, args.seed, which,
                             echo=None if cfg.output == "json" else lambda s: (out.write(s + "\n"), out.flush()))
    ok = all(r.passed for r in results)
    if cfg.output == "json":
        out.write(json.dumps({"K": cfg.K, "seed": args.seed, "pass": ok, "criteria": [
            {"number": r.number, "title": r.title, "pass": r.passed, "detail": r.detail,
             "checks": {k: bool(v) for k, v in r.checks.items()}} for r in results]}, sort_keys=True) + "\n")
    else:
        passed = sum(r.passed for r in results)
        out.write(f"{passed}/{len(results)} criteria passed\n")
    return EXIT_OK if ok else EXIT_MATH


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="starflux", description="Exact star products and flux on tori.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, product=False):
        sp.add_argument("--config", help="JSON file with engine settings")
        sp.add_argument("--K", type=int, help="truncation order in nu")
        sp.add_argument("--dim", type=int, help="torus dimension (even)")
        sp.add_argument("--D-max", dest="D_max", type=int, help="maximal Weyl degree")
        sp.add_argument("--omega", help="comma-separated C1,C2,... of Omega")
        sp.add_argument("--probe-bound", type=int, help="probe modes |m|_inf <= bound")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if product:
            sp.add_argument("--product", choices=("moyal", "fedosov"), default="fedosov")
        return sp

    sp = common(sub.add_parser("associativity-check", help="random associativity triples"), True)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.set_defaults(func=cmd_associativity_check)

    sp = common(sub.add_parser("star-table", help="cochain tables C_r(e_m, e_n)"), True)
    sp.add_argument("--modes", default="", help='modes as "1,0;0,1"')
    sp.add_argument("--orders", help="comma-separated r values (default 0..K)")
    sp.set_defaults(func=cmd_star_table)

    sp = common(sub.add_parser("fedosov-vs-moyal", help="flat Fedosov product against Moyal"))
    sp.add_argument("--modes", type=int, default=2, help="mode bound |m|_inf")
    sp.set_defaults(func=cmd_fedosov_vs_moyal)

    sp = common(sub.add_parser("flux-rotation", help="deformed flux of a rotation loop"))
    sp.add_argument("--v", required=True, help="integral velocity, e.g. 1,0")
    sp.set_defaults(func=cmd_flux_rotation)

    sp = common(sub.add_parser("gamma-table", help="flux group generators for a sweep of Omega"))
    sp.add_argument("--omega-sweep", required=True, help="JSON list of Omega coefficient lists")
    sp.set_defaults(func=cmd_gamma_table)

    sp = common(sub.add_parser("heisenberg-demo", help="time-one flow of a Hamiltonian on probes"), True)
    sp.add_argument("--H", required=True, help="Hamiltonian as JSON text or a JSON file")
    sp.set_defaults(func=cmd_heisenberg_demo)

    sp = common(sub.add_parser("equiv-check", help="flux invariance under an equivalence"), True)
    sp.add_argument("--T", required=True, help="JSON file with the equivalence operator")
    sp.add_argument("--loop", default="1,0")
    sp.set_defaults(func=cmd_equiv_check)

    sp = common(sub.add_parser("acceptance", help="run the golden-value suite"))
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--criteria", help="comma-separated subset, e.g. 1,2,3")
    sp.set_defaults(func=cmd_acceptance)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = load_config(args)
        return args.func(args, cfg, out)
    except UsageError as exc:
        sys.stderr.write(f"starflux: {exc}\n")
        return EXIT_USAGE
    except StarfluxError as exc:
        sys.stderr.write(f"starflux: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
