"""Named, replayable checks of the structural facts the engine relies on.

Each law runs on a bounded domain, either exhaustively or on a seeded sample,
and reports ``verified`` (on the covered domain only), ``refuted`` with a
replayable witness, ``undetermined`` when a budget ran out, or ``error``.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from . import oracle
from .constructions import (
    algebra_tensor,
    exterior_algebra,
    generated_submodule,
    random_corpus,
    random_finite_module,
    trivial_algebra,
    truncated_polynomial,
)
from .gf2 import support
from .modules import (
    FiniteUnstableModule,
    Free,
    ModuleMap,
    RPInfinity,
    Suspension,
    Tensor,
    UnstableModule,
    finite_subquotient,
    indecomposables,
    sq_lower,
    suspend_element,
    to_finite,
)
from .nilfilt import (
    UndeterminedError,
    filtration_layer,
    nilpotence_degree,
    rs_layer,
    rs_map,
    sq_lower_kernel,
    strong_f_iso,
)
from .parser import save_module
from .steenrod import (
    AdmissibleSum,
    Sq,
    SteenrodExpression,
    adem_normalize,
    conjugate,
    conjugation_decomposition,
    full_basis,
    ideal_membership,
    multiply,
)
from .tor import bar_tor


class UnknownLawError(KeyError):
    pass


@dataclass
class LawReport:
    id: str
    params: dict
    verdict: str  # verified | refuted | undetermined | error
    domain: str  # exhaustive | sampled
    covered: str = ""
    witness: Any = None
    expected: str = "verified"
    message: str = ""
    timing: float | None = None

    @property
    def failed(self) -> bool:
        """An error, or a verdict contradicting the registered expectation."""
        if self.verdict == "error":
            return True
        if self.verdict == "undetermined":
            return False
        return self.verdict != self.expected

    @property
    def status(self) -> str:
        if self.verdict == self.expected == "refuted":
            return "refuted (expected)"
        if self.failed and self.verdict in ("verified", "refuted"):
            return f"{self.verdict} (UNEXPECTED)"
        return self.verdict

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "id": self.id,
            "params": self.params,
            "verdict": self.verdict,
            "expected": self.expected,
            "domain": self.domain,
            "covered": self.covered,
            "witness": self.witness,
            "message": self.message,
        }
        if timing:
            out["timing"] = round(self.timing or 0.0, 6)
        return out

    def line(self) -> str:
        text = f"{self.id:<22} {self.status:<20} {self.domain:<10} {self.covered}"
        if self.verdict in ("refuted", "error", "undetermined") and (self.witness is not None or self.message):
            detail = json.dumps(self.witness, sort_keys=True) if self.witness is not None else self.message
            text += f" | {detail}"
        return text


@dataclass(frozen=True)
class Law:
    id: str
    summary: str
    run: Callable[[dict], tuple]
    defaults: dict
    domain: str
    expected: str = "verified"
    seeded: bool = False


REGISTRY: dict[str, Law] = {}


def _law(id: str, summary: str, domain: str, expected: str = "verified", seeded: bool = False, **defaults):
    def wrap(fn):
        REGISTRY[id] = Law(id, summary, fn, defaults, domain, expected, seeded)
        return fn

    return wrap


def _fmt_pairs(pairs):
    return [[str(a), str(b)] for a, b in pairs]


# -- Steenrod algebra --


@_law("adem_oracle", "Adem normal form of Sq^a Sq^b agrees with evaluation on products of degree-one classes",
      "exhaustive", max_degree=24)
def _adem_oracle(p):
    checked = 0
    for s in range(2, p["max_degree"] + 1):
        for a in range(1, s):
            e = SteenrodExpression(((a, s - a),))
            if not oracle.agree(e, adem_normalize(e), s):
                return "refuted", f"{checked} pairs", {"pair": [a, s - a]}
            checked += 1
    return "verified", f"all {checked} pairs with a+b <= {p['max_degree']}", None


@_law("conjugation", "chi is an involution and an anti-homomorphism on admissible monomials",
      "exhaustive", max_degree=20)
def _conjugation(p):
    top = p["max_degree"]
    basis = {d: [AdmissibleSum([m]) for m in full_basis(d)] for d in range(top + 1)}
    n = 0
    for d in range(top + 1):
        for a in basis[d]:
            if conjugate(conjugate(a)) != a:
                return "refuted", "", {"involution": str(a)}
    for d1 in range(top + 1):
        for d2 in range(top + 1 - d1):
            for a in basis[d1]:
                for b in basis[d2]:
                    n += 1
                    if conjugate(multiply(a, b)) != multiply(conjugate(b), conjugate(a)):
                        return "refuted", "", {"pair": [str(a), str(b)]}
    size = sum(len(v) for v in basis.values())
    return "verified", f"{size} monomials, {n} pairs, degree <= {top}", None


@_law("lemma_5_7", "Sq^(2^n) Sq^(2^n) lies in Abar(n-1) Sq^(2^n) Abar(n-1), with a replayed witness",
      "exhaustive", n=[1, 2, 3, 4])
def _lemma_5_7(p):
    witnesses = {}
    for n in p["n"]:
        half = 1 << n
        target = Sq(half, half)
        w = ideal_membership(target, n)
        if w is None:
            return "refuted", f"n in {p['n']}", {"n": n, "target": str(target)}
        total = AdmissibleSum()
        for a, b in w:
            total = total + multiply(multiply(a, Sq(half)), b)
        if total != target:
            return "refuted", f"n in {p['n']}", {"n": n, "bad_witness": _fmt_pairs(w)}
        witnesses[str(n)] = _fmt_pairs(w)
    return "verified", f"n in {p['n']}", witnesses


@_law("cartan_serre_leading", "admissibles of degree 2^(n+1) and length >= 2 start above 2^n",
      "exhaustive", n_max=5)
def _leading(p):
    count = 0
    for n in range(1, p["n_max"] + 1):
        for m in full_basis(1 << (n + 1)):
            count += 1
            if len(m) >= 2 and m[0] <= 1 << n:
                return "refuted", "", {"n": n, "monomial": list(m)}
    return "verified", f"{count} monomials, n <= {p['n_max']}", None


@_law("chi_top_absent", "Sq^(2^(n+1)) does not occur in chi(Sq^(2^n) Sq^(2^n))", "exhaustive", n_max=5)
def _chi_top(p):
    for n in range(1, p["n_max"] + 1):
        c = conjugate(Sq(1 << n, 1 << n))
        if (1 << (n + 1),) in c:
            return "refuted", "", {"n": n}
    return "verified", f"n <= {p['n_max']}", None


@_law("consequence", "Sq^(2^n) Sq^(2^n) = sum a_j b_j with 2^n < deg b_j < 2^(n+1), by both routes",
      "exhaustive", n_max=4)
def _consequence(p):
    out = {}
    for n in range(1, p["n_max"] + 1):
        half = 1 << n
        target = Sq(half, half)
        routes = {
            "conjugation": conjugation_decomposition(n),
            "membership": [(a, multiply(Sq(half), b)) for a, b in ideal_membership(target, n) or []],
        }
        for name, pairs in routes.items():
            total = AdmissibleSum()
            for a, b in pairs:
                if not b or b.degree is None or not half < b.degree < 2 * half:
                    return "refuted", "", {"n": n, "route": name, "factor": str(b)}
                total = total + multiply(a, b)
            if total != target:
                return "refuted", "", {"n": n, "route": name}
        out[str(n)] = len(routes["conjugation"])
    return "verified", f"n <= {p['n_max']}", None


def _displayed_sum(n: int) -> AdmissibleSum:
    top = 1 << (n + 1)
    return AdmissibleSum([(top - (1 << t), 1 << t) for t in range(1, n)])


@_law("adem_display_5", "the displayed expansion sum_{t=1}^{n-1} Sq^(2^(n+1)-2^t) Sq^(2^t) of Sq^(2^n) Sq^(2^n)",
      "exhaustive", expected="refuted", n=[1, 2])
def _display(p):
    diffs = {}
    for n in p["n"]:
        half = 1 << n
        actual = adem_normalize([(half, half)])
        if not oracle.agree(actual, SteenrodExpression(((half, half),)), 2 * half):
            return "error", "", None
        shown = _displayed_sum(n)
        if shown != actual:
            diffs[str(n)] = {
                "difference": str(actual + shown),
                "missing": _minus(actual, shown),
                "extra": _minus(shown, actual),
                "adem": str(actual),
            }
    if diffs:
        return "refuted", f"n in {p['n']}", diffs
    return "verified", f"n in {p['n']}", None


def _minus(a: AdmissibleSum, b: AdmissibleSum) -> str:
    return str(AdmissibleSum([m for m in a.terms if m not in b], check=False))


# -- modules and the filtration --


def _corpus(p) -> list[FiniteUnstableModule]:
    return random_corpus(p["seed"], p["count"], p["top"], p["max_dim"])


@_law("lemma_6_2", "the common kernel of Sq_0..Sq_h is a submodule", "sampled", seeded=True,
      count=200, top=10, max_dim=3)
def _lemma_6_2(p):
    checked = 0
    for m in _corpus(p):
        for h in range(m.top_degree + 1):
            rep = sq_lower_kernel(m, h)
            checked += 1
            if not rep.closed:
                d, i, v = rep.violations[0]
                return "refuted", f"{checked} (module, h) pairs", {
                    "module": save_module(m), "h": h, "degree": d, "op": f"Sq{i}", "vector": v}
    return "verified", f"{p['count']} modules, {checked} (module, h) pairs", None


@_law("prop_2_4", "on finite modules M_s is the span of the degrees >= s", "sampled", seeded=True,
      count=200, top=10, max_dim=3, c_max=16)
def _prop_2_4(p):
    checked = 0
    for m in _corpus(p):
        top = m.top_degree
        for s in range(top + 2):
            got = filtration_layer(m, s, top, p["c_max"]).dims()
            want = [m.dim(d) if d >= s else 0 for d in range(top + 1)]
            checked += 1
            if got != want:
                return "refuted", f"{checked} layers", {"module": save_module(m), "s": s, "got": got, "want": want}
    return "verified", f"{p['count']} modules, {checked} layers", None


def _point(s: int, dim: int) -> FiniteUnstableModule:
    return FiniteUnstableModule([0] * s + [dim], name=f"K{s}^{dim}" if dim > 1 else f"K{s}")


@_law("cor_2_5", "R_s(K ⊗ F(1)) has the dims of K ⊗ F(1) for K concentrated in degree s; other layers vanish",
      "exhaustive", s_values=[0, 1, 2, 3, 4], dims=[1, 2, 3], degree_bound=64, c_max=16)
def _cor_2_5(p):
    bound = p["degree_bound"]
    n = 0
    for s in p["s_values"]:
        for k in p["dims"]:
            f1 = Free(1, 2 * (bound + s))
            m = Tensor(_point(s, k), f1)
            for t in range(s + 3):
                r = rs_layer(m, t, bound + s, p["c_max"])
                for e in range(bound + 1):
                    got = r.dim(e) if e <= r.top_degree else 0
                    want = k * f1.dim(e) if t == s else 0
                    if got != want:
                        return "refuted", "", {"s": s, "dim": k, "t": t, "degree": e, "got": got, "want": want}
                n += 1
    return "verified", f"{n} layers through degree {bound}", None


def _is_pow2(d: int) -> bool:
    return d > 0 and d & (d - 1) == 0


def _two_powers(d: int) -> bool:
    return _is_pow2(d) or bin(d).count("1") == 2


def _u_examples(p, factors: int) -> list[tuple[str, UnstableModule, int]]:
    bound = p["degree_bound"]
    rng = random.Random(p["seed"])
    ks = [_point(s, 1) for s in range(3)]
    ks += [random_finite_module(rng, top=p["k_top"], max_dim=2, name=f"K{j}") for j in range(p["count"])]
    out = []
    for k in ks:
        m: UnstableModule = k
        for _ in range(factors):
            m = Tensor(m, Free(1, 4 * bound))
        out.append((k.name, m, k.top_degree))
    return out


@_law("support_u1", "layers of K ⊗ F(1) are concentrated in degrees 2^h", "sampled", seeded=True,
      count=3, k_top=4, degree_bound=64, c_max=16)
def _support_u1(p):
    n = 0
    for name, m, ktop in _u_examples(p, 1):
        for t in range(ktop + 2):
            r = rs_layer(m, t, p["degree_bound"], p["c_max"])
            n += 1
            for e in range(r.top_degree + 1):
                if r.dim(e) and not _is_pow2(e):
                    return "refuted", "", {"K": name, "t": t, "degree": e}
    return "verified", f"{n} layers through degree {p['degree_bound']}", None


@_law("support_u2", "layers of K ⊗ F(1) ⊗ F(1), and tensor squares of layers of K ⊗ F(1), sit in degrees 2^h or 2^i+2^j",
      "sampled", seeded=True, count=2, k_top=3, degree_bound=64, c_max=16)
def _support_u2(p):
    n = 0
    bound = p["degree_bound"]
    for name, m, ktop in _u_examples(p, 2):
        for t in range(ktop + 2):
            r = rs_layer(m, t, bound, p["c_max"])
            n += 1
            for e in range(r.top_degree + 1):
                if r.dim(e) and not _two_powers(e):
                    return "refuted", "", {"K": name, "t": t, "degree": e}
    for name, m, ktop in _u_examples(p, 1):
        for t in range(ktop + 2):
            r = rs_layer(m, t, bound, p["c_max"])
            if not any(r.dims):
                continue
            sq = to_finite(Tensor(r, r), r.top_degree, truncated=True)
            n += 1
            for e in range(sq.top_degree + 1):
                if sq.dim(e) and not _two_powers(e):
                    return "refuted", "", {"K": name, "t": t, "square_degree": e}
    return "verified", f"{n} modules through degree {bound}", None


def _split_at(m: FiniteUnstableModule, k: int):
    """``(M_{>=k}, M, M / M_{>=k})`` with the maps between them."""
    top = m.top_degree
    high = {d: [1 << j for j in range(m.dim(d))] for d in range(k, top + 1)}
    full = {d: [1 << j for j in range(m.dim(d))] for d in range(top + 1)}
    sub, _ = finite_subquotient(m, high, {}, top, name=f"{m.name}>={k}")
    quo, _ = finite_subquotient(m, full, high, top, name=f"{m.name}<{k}")
    return sub, quo


@_law("prop_1_8", "if K is k-nilpotent in 0 -> K -> M -> N -> 0 then R_s(M) and R_s(N) agree for s < k",
      "sampled", seeded=True, count=12, top=5, max_dim=2, degree_bound=32, c_max=16)
def _prop_1_8(p):
    rng = random.Random(p["seed"])
    bound = p["degree_bound"]
    n = 0
    for j in range(p["count"]):
        base = random_finite_module(rng, p["top"], p["max_dim"], name=f"L{j}")
        for k in range(1, base.top_degree + 1):
            sub, quo = _split_at(base, k)
            pairs = [(base, quo, base.top_degree)]
            f1 = Free(1, 4 * bound)
            pairs.append((Tensor(base, f1), Tensor(quo, f1), bound))
            for mm, nn, b in pairs:
                for s in range(k):
                    rm = rs_layer(mm, s, b, p["c_max"])
                    rn = rs_layer(nn, s, b, p["c_max"])
                    n += 1
                    if rm.dims != rn.dims:
                        return "refuted", "", {"module": save_module(base), "k": k, "s": s,
                                               "tensor_f1": mm is not base, "R_M": list(rm.dims), "R_N": list(rn.dims)}
    return "verified", f"{n} comparisons", None


def _tensor_inclusion(sub: FiniteUnstableModule, ambient: FiniteUnstableModule, incl, bound: int):
    f1 = Free(1, 4 * bound)
    ts, ta = Tensor(sub, f1), Tensor(ambient, f1)

    def on_basis(d, j):
        pdeg, a, b = ts.entry(d, j)
        return ta.pure(pdeg, incl(pdeg, 1 << a), d - pdeg, 1 << b)

    return ModuleMap(ts, ta, on_basis)


@_law("prop_1_9", "if N is d-nilpotent and M/N is 2d-nilpotent then R_s(N) -> R_s(M) is a strong F-isomorphism for d <= s < 2d",
      "sampled", seeded=True, count=12, top=6, max_dim=2, degree_bound=24, c_max=16)
def _prop_1_9(p):
    rng = random.Random(p["seed"])
    bound = p["degree_bound"]
    n = 0
    undetermined = None
    for j in range(p["count"]):
        d = rng.randint(1, 2)
        base = random_finite_module(rng, p["top"], p["max_dim"], name=f"L{j}")
        if base.top_degree < d:
            continue
        m, _ = _split_at(base, d)
        gens = {e: [1 << i for i in range(m.dim(e))] for e in range(min(2 * d, m.top_degree + 1))}
        e = rng.randint(0, m.top_degree)
        if m.dim(e):
            gens.setdefault(e, []).append(rng.getrandbits(m.dim(e)) or 1)
        span = generated_submodule(m, gens, m.top_degree)
        nsub, sq = finite_subquotient(m, {e: s.basis for e, s in span.items()}, {}, m.top_degree, name=f"N{j}")

        def incl(e, v, sq=sq):
            return sq.include(e, v)

        maps = [(ModuleMap(nsub, m, lambda e, i, sq=sq: sq.representatives[e][i]), m.top_degree),
                (_tensor_inclusion(nsub, m, incl, bound), bound)]
        for f, b in maps:
            for s in range(d, 2 * d):
                rn, rm, g = rs_map(f, s, b, p["c_max"])
                res = strong_f_iso(g, rm.top_degree, p["c_max"])
                n += 1
                if res.verdict == "no":
                    return "refuted", "", {"module": save_module(base), "d": d, "s": s,
                                           "tensor_f1": f.source is not nsub, "witness": list(res.witness)}
                if res.verdict == "unknown" and undetermined is None:
                    undetermined = {"module": save_module(base), "d": d, "s": s}
    if undetermined is not None:
        return "undetermined", f"{n} maps", undetermined
    return "verified", f"{n} maps", None


@_law("susp_formula", "Sq_{k+s} of a suspended class is the suspension of Sq_k", "sampled", seeded=True,
      count=40, top=8, max_dim=3, s_max=3)
def _susp(p):
    mods: list[UnstableModule] = list(random_corpus(p["seed"], p["count"], p["top"], p["max_dim"]))
    mods += [RPInfinity(), Tensor(_point(2, 2), Free(1, 64))]
    n = 0
    for m in mods:
        top = p["top"]
        for s in range(1, p["s_max"] + 1):
            sm = Suspension(m, s)
            for d in range(top + 1):
                for j in range(m.dim(d)):
                    x = m.basis_element(d, j)
                    sx = suspend_element(sm, x)
                    for k in range(-1, d + 2):
                        lhs = sq_lower(sm, k + s, sx, unbounded=True)
                        rhs = suspend_element(sm, sq_lower(m, k, x, unbounded=True))
                        n += 1
                        if lhs != rhs:
                            return "refuted", "", {"module": m.name, "s": s, "degree": d, "index": j, "k": k}
    return "verified", f"{n} instances", None


@_law("tensor_nil", "a u-nilpotent class tensored with a v-nilpotent class is (u+v)-nilpotent", "sampled",
      seeded=True, count=30, top=5, max_dim=2, c_max=16)
def _tensor_nil(p):
    rng = random.Random(p["seed"])
    n = 0
    pairs: list[tuple[UnstableModule, UnstableModule]] = []
    for j in range(p["count"]):
        pairs.append((random_finite_module(rng, p["top"], p["max_dim"], name=f"X{j}"),
                      random_finite_module(rng, p["top"], p["max_dim"], name=f"Y{j}")))
    f1 = Free(1, 256)
    for s in range(4):
        pairs.append((_point(s, 2), f1))
    pairs.append((RPInfinity(), _point(2, 1)))
    for x_mod, y_mod in pairs:
        t = Tensor(x_mod, y_mod)
        xs = [(d, j) for d in range(p["top"] + 1) for j in range(x_mod.dim(d))]
        ys = [(d, j) for d in (list(range(p["top"] + 1)) + [8, 16]) for j in range(y_mod.dim(d))]
        for (dx, jx), (dy, jy) in [(rng.choice(xs), rng.choice(ys)) for _ in range(4)] if xs and ys else []:
            cx = nilpotence_degree(x_mod, x_mod.basis_element(dx, jx), dx + 1, p["c_max"])
            cy = nilpotence_degree(y_mod, y_mod.basis_element(dy, jy), dy + 1, p["c_max"])
            if cx.verdict == "unknown" or cy.verdict == "unknown":
                continue
            want = cx.at_least + cy.at_least
            v = t.pure(dx, 1 << jx, dy, 1 << jy)
            cxy = nilpotence_degree(t, t.element(dx + dy, v), want, p["c_max"])
            n += 1
            if not cxy.verify():
                return "error", "", {"pair": [x_mod.name, y_mod.name], "message": "certificate failed replay"}
            if cxy.verdict == "unknown":
                return "undetermined", f"{n} pairs", {"pair": [x_mod.name, y_mod.name]}
            if cxy.at_least < want:
                return "refuted", "", {"pair": [x_mod.name, y_mod.name], "x": [dx, jx], "y": [dy, jy],
                                       "nil_x": cx.at_least, "nil_y": cy.at_least, "nil_xy": cxy.at_least}
    return "verified", f"{n} element pairs", None


# -- Tor --


def _test_algebras():
    return [
        trivial_algebra(),
        exterior_algebra(3),
        exterior_algebra(1, 2),
        truncated_polynomial(1, 4),
        truncated_polynomial(2, 3),
        algebra_tensor(truncated_polynomial(1, 3), exterior_algebra(2)),
        algebra_tensor(truncated_polynomial(1, 2), truncated_polynomial(1, 3)),
    ]


@_law("tor_corner", "Tor^{-1} is the module of indecomposables; columns vanish below the connectivity line",
      "exhaustive", s_max=3)
def _tor_corner(p):
    for alg in _test_algebras():
        top = alg.top_degree
        page = bar_tor(alg, p["s_max"], max(top, 1) * p["s_max"])
        col = page.column(1)
        q = indecomposables(alg)
        qdims = [q.dim(t) for t in range(col.top_degree + 1)]
        if list(col.dims) != qdims:
            return "refuted", "", {"algebra": alg.module.name, "tor1": list(col.dims), "Q": qdims}
        for i in range(1, top + 1):
            for t in range(top + 1 - i):
                if col.matrix(i, t) != q.matrix(i, t):
                    return "refuted", "", {"algebra": alg.module.name, "op": f"Sq{i}", "degree": t}
        conn = page.metadata["connectivity"]
        for (s, t), e in page.entries.items():
            if e.dim and t < s * (conn + 1):
                return "refuted", "", {"algebra": alg.module.name, "entry": [s, t]}
    return "verified", f"{len(_test_algebras())} algebras", None


@_law("tor_exterior", "Tor over Λ(x3) is one class in each bidegree (-s, 3s)", "exhaustive", s_max=4, t_max=12)
def _tor_exterior(p):
    page = bar_tor(exterior_algebra(3), p["s_max"], p["t_max"])
    for (s, t), e in sorted(page.entries.items()):
        want = 1 if t == 3 * s else 0
        if e.dim != want:
            return "refuted", "", {"entry": [s, t], "dim": e.dim}
    return "verified", f"s <= {p['s_max']}, t <= {p['t_max']}", None


# -- runner --


def law_ids() -> list[str]:
    return list(REGISTRY)


def run_law(id: str, params: dict | None = None, seed: int = 0) -> LawReport:
    """Run one law. Unknown parameter names are rejected.

    Raises:
        UnknownLawError: ``id`` is not registered.
    """
    law = REGISTRY.get(id)
    if law is None:
        raise UnknownLawError(id)
    merged = dict(law.defaults)
    if law.seeded:
        merged["seed"] = seed
    for k, v in (params or {}).items():
        if k not in merged:
            raise ValueError(f"law {id} has no parameter {k!r}")
        merged[k] = v
    start = time.perf_counter()
    try:
        verdict, covered, witness = law.run(merged)
        message = ""
    except UndeterminedError as exc:
        verdict, covered, witness, message = "undetermined", "", None, str(exc)
    except Exception as exc:  # a law must never take the suite down
        verdict, covered, witness, message = "error", "", None, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    return LawReport(id, merged, verdict, law.domain, covered, witness, law.expected, message, elapsed)


def _threads() -> int:
    raw = os.environ.get("NILOPS_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def run_suite(only: Iterable[str] | None = None, seed: int = 0, threads: int | None = None) -> list[LawReport]:
    """Run the selected laws (all by default); reports come back in registry order."""
    ids = list(REGISTRY) if not only else list(dict.fromkeys(only))
    for i in ids:
        if i not in REGISTRY:
            raise UnknownLawError(i)
    workers = threads or _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda i: run_law(i, seed=seed), ids))
    else:
        reports = [run_law(i, seed=seed) for i in ids]
    order = {i: n for n, i in enumerate(REGISTRY)}
    return sorted(reports, key=lambda r: order[r.id])


def suite_json(reports: list[LawReport], seed: int, timing: bool = False) -> str:
    doc = {"seed": seed, "reports": [r.to_dict(timing) for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=True)


def suite_text(reports: list[LawReport], seed: int, timing: bool = False) -> str:
    lines = [f"# law suite, seed={seed}"]
    for r in reports:
        line = r.line()
        if timing:
            line += f" [{r.timing:.3f}s]"
        lines.append(line)
    failed = sum(r.failed for r in reports)
    lines.append(f"# {len(reports)} laws, {failed} unexpected")
    return "\n".join(lines) + "\n"
