"""Golden-value acceptance suite, shared by the command line and the tests."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .dynamics import AutPath, hamiltonianize, probe_modes
from .equivalence import EquivalenceOperator, transport
from .fedosov import FedosovData, FedosovProduct
from .flux import (
    flux_def_closed_form,
    flux_def_generic,
    flux_def_of_loop,
    flux_of_path,
    flux_order1,
    gamma_generators,
)
from .formal import FormalScalar, GaussQ
from .star import MoyalProduct, axiom_residuals, check_associativity
from .torus import H1Class, TorusForm, TorusFun, dfun
from .weyl import SymplecticConnection, WeylSection, delta, delta_inv

__all__ = [
    "CriterionResult",
    "CRITERIA",
    "run_acceptance",
    "random_fun",
    "random_section",
    "GOLDEN_PAIRS",
    "test_connection",
]

GOLDEN_PAIRS = ((1, 0), (2, 5), (-1, 3))
DEFAULT_SEED = 20240607


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    checks: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.seconds:.1f}s) {self.detail}".rstrip()


# ----------------------------------------------------------------------
# random data
# ----------------------------------------------------------------------

def _rand_gq(rng: random.Random) -> GaussQ:
    den = rng.choice((1, 1, 2, 3))
    return GaussQ(Fraction(rng.randint(-3, 3), den), Fraction(rng.randint(-3, 3), den))


def random_fun(rng: random.Random, dim: int = 2, K: int = 4, bound: int = 2, nmodes: int = 3,
               nu_terms: bool = False) -> TorusFun:
    """Fourier polynomial with ``nmodes`` random modes ``|m|_inf <= bound``."""
    modes = {}
    for _ in range(nmodes):
        m = tuple(rng.randint(-bound, bound) for _ in range(dim))
        coeffs = [_rand_gq(rng)]
        if nu_terms:
            coeffs += [_rand_gq(rng) if rng.random() < 0.5 else 0 for _ in range(K)]
        modes[m] = FormalScalar(coeffs, K)
    return TorusFun(modes, dim, K)


def random_section(rng: random.Random, dim: int = 2, K: int = 3, D_max: int = 8,
                   nterms: int = 4, max_form: int = 2) -> WeylSection:
    """Random Weyl section with terms of Weyl degree below ``D_max``.

    The top degree is left empty so that ``delta^{-1}`` is never truncated.
    """
    terms = {}
    for _ in range(nterms):
        k = rng.randint(0, min(K, (D_max - 1) // 2))
        left = D_max - 1 - 2 * k
        total = rng.randint(0, min(left, 4))
        alpha = [0] * dim
        for _ in range(total):
            alpha[rng.randrange(dim)] += 1
        q = rng.randint(0, min(max_form, dim))
        J = tuple(sorted(rng.sample(range(dim), q)))
        m = tuple(rng.randint(-2, 2) for _ in range(dim))
        terms[(k, m, tuple(alpha), J)] = _rand_gq(rng) or GaussQ(1)
    return WeylSection(terms, dim, K, D_max)


def test_connection() -> SymplecticConnection:
    """Constant-coefficient, non-flat symplectic connection used by the suite."""
    return SymplecticConnection.from_lowered({(0, 0, 0): 1, (0, 0, 1): 2, (0, 1, 1): -1, (1, 1, 1): 3})


def _expected_flux(C, v, K) -> H1Class:
    s = FormalScalar([1] + [-c for c in C][:K], K)
    comps = [FormalScalar.zero(K)] * 2
    if tuple(v) == (1, 0):
        comps[1] = s
    else:
        comps[0] = s
    return H1Class(tuple(comps))


# ----------------------------------------------------------------------
# criteria
# ----------------------------------------------------------------------

def crit1(K: int, seed: int) -> tuple:
    checks = {}
    notes = []
    for C in GOLDEN_PAIRS:
        data = FedosovData(None, C, K=K)
        f1 = flux_def_of_loop((1, 0), data)
        f2 = flux_def_of_loop((0, 1), data)
        checks[f"{C} d/dtheta1 -> dtheta2(1 - nu C1 - nu^2 C2)"] = f1 == _expected_flux(C, (1, 0), K)
        literal = _expected_flux(C, (0, 1), K)
        ok2 = f2 == literal
        checks[f"{C} d/dtheta2 -> +dtheta1(1 - nu C1 - nu^2 C2)"] = ok2
        if not ok2 and f2 == -literal:
            notes.append(str(C))
    detail = ""
    if notes:
        detail = ("d/dtheta2 loop gives -dtheta1(1 - nu C1 - nu^2 C2) for " + ", ".join(notes)
                  + "; i(d/dtheta2)(dtheta1 ^ dtheta2) = -dtheta1 fixes the sign")
    return all(checks.values()), detail, checks


def crit2(K: int, seed: int) -> tuple:
    checks = {}
    configs = [(f"flat {C}", None, C) for C in GOLDEN_PAIRS]
    configs.append(("constant Christoffel (1,2)", test_connection(), (1, 2)))
    for name, conn, C in configs:
        data = FedosovData(conn, C, K=K)
        for v in ((1, 0), (0, 1)):
            checks[f"{name} v={v}"] = flux_def_of_loop(v, data) == flux_def_closed_form(v, data)
    return all(checks.values()), "", checks


def crit3(K: int, seed: int) -> tuple:
    K = 4
    F, M = FedosovProduct(2, K), MoyalProduct(2, K)
    modes = probe_modes(2, 2)
    bad = [(m, n) for m in modes for n in modes if F.star(TorusFun.mode(m, 1, K), TorusFun.mode(n, 1, K))
           != M.star(TorusFun.mode(m, 1, K), TorusFun.mode(n, 1, K))]
    return not bad, f"{len(modes) ** 2} mode pairs through nu^4, {len(bad)} mismatches", {"pairs": not bad}


def crit4(K: int, seed: int) -> tuple:
    rng = random.Random(seed + 4)
    checks = {}
    for name, P in (("moyal", MoyalProduct(2, K)), ("fedosov", FedosovProduct(2, K, Omega=(1, 2))),
                    ("fedosov non-flat", FedosovProduct(2, K, test_connection(), (1, 2)))):
        ok = True
        for _ in range(5):
            F, G = random_fun(rng, 2, K, 2, 2), random_fun(rng, 2, K, 2, 2)
            ok &= not any(axiom_residuals(P, F, G).values())
        checks[name] = ok
    return all(checks.values()), "", checks


def crit5(K: int, seed: int) -> tuple:
    K = 4
    rng = random.Random(seed + 5)
    checks = {}
    for name, P in (("moyal", MoyalProduct(2, K)), ("fedosov", FedosovProduct(2, K, Omega=(1, -2)))):
        bad = 0
        for _ in range(100):
            F, G, H = (random_fun(rng, 2, K, 2, 2) for _ in range(3))
            if check_associativity(P, F, G, H):
                bad += 1
        checks[name] = bad == 0
    return all(checks.values()), "100 seeded triples per product at K=4", checks


def crit6(K: int, seed: int) -> tuple:
    rng = random.Random(seed + 6)
    data = FedosovData(test_connection(), (1, 2), K=K)
    D = data.D_max
    checks = {}
    hodge = True
    for _ in range(50):
        a = random_section(rng, 2, K, D)
        a00 = a.filter(lambda k, m, al, J: not any(al) and not J)
        hodge &= delta(delta_inv(a)) + delta_inv(delta(a)) == a - a00
    checks["Hodge identity (50 sections)"] = hodge
    flat = True
    for _ in range(50):
        a = random_section(rng, 2, K, D)
        flat &= not data.D(data.D(a)).degree_part(0, D - 2)
    checks["D^2 = 0 (50 sections)"] = flat
    res = data.r_residuals()
    checks["r fixed point"] = not res["fixed_point"]
    checks["delta^-1 r = 0"] = not res["delta_inv"]
    checks["r degree >= 3"] = res["min_degree_ok"] and not res["low_degree"]
    sq = True
    for _ in range(50):
        F = random_fun(rng, 2, K, 2, 3, nu_terms=True)
        sq &= data.Q(F).sigma() == F
    checks["sigma Q = id (50 functions)"] = sq
    return all(checks.values()), "", checks


def _random_vertical_generator(rng, P, K, degree=1):
    nu = FormalScalar.nu(K)
    out = {}
    for j in range(degree + 1):
        H = random_fun(rng, 2, K, 1, 2).scale(nu)
        harm = TorusForm.one_form([nu * rng.randint(-2, 2), nu * rng.randint(-2, 2)], K)
        out[j] = dfun(H) + harm
    return out


def crit7(K: int, seed: int) -> tuple:
    rng = random.Random(seed + 7)
    P = MoyalProduct(2, K)
    nu = FormalScalar.nu(K)
    checks = {}
    add_ok = True
    for i in range(10):
        # two cases with a time-dependent factor; the rest autonomous
        A = AutPath(_random_vertical_generator(rng, P, K, int(i < 2)), P)
        B = AutPath(_random_vertical_generator(rng, P, K, 0), P)
        prod = A.family().compose(B.family())
        add_ok &= flux_of_path((prod, P)) == A.flux() + B.flux()
    checks["additivity (10 cases)"] = add_ok
    zero_ok = True
    for _ in range(10):
        H = {j: random_fun(rng, 2, K, 1, 2).scale(nu) for j in range(rng.randint(1, 2))}
        path = AutPath.hamiltonian(H, P)
        zero_ok &= flux_of_path((path.family(), P)).is_zero() and path.flux().is_zero()
    checks["zero flux of Hamiltonian paths (10 cases)"] = zero_ok
    H0 = random_fun(rng, 2, K, 1, 2).scale(nu)
    H1 = random_fun(rng, 2, K, 1, 1).scale(nu)
    harm = TorusForm.one_form([nu * 2, -nu], K)
    detour = AutPath({0: dfun(H0) + harm, 1: dfun(H1) + harm.scale(-2)}, P)
    Hs = hamiltonianize(detour)
    end = AutPath.hamiltonian(Hs, P).endpoint()
    checks["hamiltonianize round trip (probes |m|<=3)"] = end.equals_on_probes(detour.endpoint(), 3)
    return all(checks.values()), "", checks


def crit8(K: int, seed: int) -> tuple:
    checks = {}
    for C1 in (1, -2, 3, Fraction(1, 2), Fraction(-5, 3)):
        P = FedosovProduct(2, max(K, 2), Omega=(C1, 1))
        for v in ((1, 0), (0, 1)):
            checks[f"C1={C1} v={v}"] = flux_order1(v, P) == flux_def_of_loop(v, P).truncate(1)
    return all(checks.values()), "", checks


def crit9(K: int, seed: int) -> tuple:
    K = 3
    checks = {}
    T_choices = {
        "d1d1 + 2 d1d2": EquivalenceOperator({(1, (2, 0)): 1, (1, (1, 1)): 2}, 2, K),
        "-3 d2d2 + 1/2 d1d2": EquivalenceOperator({(1, (0, 2)): -3, (1, (1, 1)): Fraction(1, 2)}, 2, K),
    }
    base = FedosovProduct(2, K, Omega=(2, 5))
    for name, T in T_choices.items():
        P2 = transport(base, T)
        for v in ((1, 0), (0, 1)):
            checks[f"{name} v={v}"] = flux_def_generic(v, P2) == flux_def_of_loop(v, base)
    return all(checks.values()), "", checks


def crit10(K: int, seed: int) -> tuple:
    g1 = gamma_generators(FedosovData(None, (1, 0), K=K))
    g2 = gamma_generators(FedosovData(None, (2, 0), K=K))
    g1b = gamma_generators(FedosovData(None, (1, 0), K=K))
    checks = {"different C1 -> different generators": set(map(repr, g1)) != set(map(repr, g2)),
              "same data -> same generators": g1 == g1b}
    return all(checks.values()), "", checks


def crit11(K: int, seed: int) -> tuple:
    checks = {}
    for C in GOLDEN_PAIRS:
        base = FedosovData(None, C, K=K)
        wide = FedosovData(None, C, K=K, D_max=base.D_max + 2)
        deep = FedosovData(None, C, K=K + 1)
        for v in ((1, 0), (0, 1)):
            f = flux_def_of_loop(v, base)
            checks[f"flux {C} v={v} D_max+2"] = f == flux_def_of_loop(v, wide)
            checks[f"flux {C} v={v} K+1"] = f == flux_def_of_loop(v, deep).with_order(K)
            c = flux_def_closed_form(v, base)
            checks[f"closed form {C} v={v} stable"] = (c == flux_def_closed_form(v, wide)
                                                      == flux_def_closed_form(v, deep).with_order(K))
    K4 = 4
    F = FedosovProduct(2, K4)
    Fw = FedosovProduct(2, K4, D_max=F.data.D_max + 2)
    Fd = FedosovProduct(2, K4 + 1)
    ok_w = ok_d = True
    for m in probe_modes(2, 2):
        for n in probe_modes(2, 2):
            em, en = TorusFun.mode(m, 1, K4), TorusFun.mode(n, 1, K4)
            p = F.star(em, en)
            ok_w &= p == Fw.star(em, en)
            ok_d &= p == Fd.star(em.with_order(K4 + 1), en.with_order(K4 + 1)).with_order(K4)
    checks["Fedosov=Moyal gate D_max+2"] = ok_w
    checks["Fedosov=Moyal gate K+1"] = ok_d
    return all(checks.values()), "", checks


CRITERIA: dict[int, tuple[str, Callable]] = {
    1: ("torus flux golden values", crit1),
    2: ("full lift equals closed form", crit2),
    3: ("Fedosov(flat, Omega=0) equals Moyal", crit3),
    4: ("star product axioms", crit4),
    5: ("associativity", crit5),
    6: ("Fedosov internal invariants", crit6),
    7: ("flux morphism properties", crit7),
    8: ("order-one flux formula", crit8),
    9: ("flux invariance under equivalence", crit9),
    10: ("flux group distinguishes C1", crit10),
    11: ("stability under D_max+2 and K+1", crit11),
}


def run_criterion(n: int, K: int = 3, seed: int = DEFAULT_SEED) -> CriterionResult:
    title, fn = CRITERIA[n]
    t0 = time.time()
    passed, detail, checks = fn(K, seed)
    if not passed and not detail:
        detail = "failed: " + ", ".join(k for k, v in checks.items() if not v)
    return CriterionResult(n, title, bool(passed), detail, time.time() - t0, checks)


def run_acceptance(K: int = 3, seed: int = DEFAULT_SEED, which=None, echo=None) -> list:
    """Run the selected criteria (all by default); ``echo`` receives each result line."""
    out = []
    for n in sorted(which or CRITERIA):
        res = run_criterion(n, K, seed)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
