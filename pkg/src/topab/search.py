"""Instance families and hypothesis-dropping counterexample search.

Each registered theorem owns a family builder (deterministic, stratified:
small exhaustive strata plus a seeded sample of the larger space) and an
evaluator mapping an instance to a VerificationReport.  run_search streams
the family, skips instances failing surviving hypotheses, evaluates the
conclusion on the rest, and reports failures as replayable witnesses after
a core-shrinking pass.
"""

from __future__ import annotations

import itertools
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cache

from .errors import (
    BudgetExceeded,
    DiagramError,
    InvalidSection,
    NotTopologizing,
    UnknownHypothesis,
    UnknownTheorem,
)
from .groups import (
    Element,
    FinAbGroup,
    Homomorphism,
    all_homs,
    all_subgroups,
    hom_from_table,
    identity_hom,
    isomorphism_class_moduli,
    zero_hom,
)
from .topology import TopAbGroup, TopHom, discrete, is_discrete
from .extensions import (
    AlgExtension,
    Extension,
    ExtensionSquare,
    FactorSet,
    Section,
    alg_extension_from_cocycle,
    comparison_map,
    enumerate_sections,
    factor_set,
    factor_set_from_section,
    is_topologizing,
    nagao_core,
    nagao_topology,
    validate_cocycle,
)
from .diagrams import (
    FiveTermRow,
    FiveTermSquare,
    InjectiveSquare,
    SquareWithSections,
    VerificationReport,
    verify_five_lemma_nagao,
    verify_haus_exactness,
    verify_lemma_strictness_injectivity,
    verify_open_fibers,
    verify_p3_discrete,
    verify_p3_generalized,
    verify_topological_five_lemma,
)
from . import jsonio


# ---------------------------------------------------------------------------
# enumeration substrate


def all_groups_up_to_order(n: int) -> tuple[FinAbGroup, ...]:
    """One group per isomorphism class of order <= n, deterministic order."""
    if n < 1:
        raise ValueError("order bound must be >= 1")
    out = []
    for m in range(1, n + 1):
        for moduli in isomorphism_class_moduli(m):
            out.append(FinAbGroup(moduli))
    return tuple(out)


@cache
def all_cocycles(A: FinAbGroup, B: FinAbGroup, budget: int = 10**6) -> tuple[FactorSet, ...]:
    """All normalized symmetric cocycles B x B -> A, by direct enumeration."""
    if A.order ** ((B.order - 1) ** 2) > budget:
        raise BudgetExceeded(
            f"{A.order}^{(B.order - 1) ** 2} raw tables exceed the budget; sample instead"
        )
    nonzero = [b for b in B.elements if b != B.zero]
    slots = [(b, bp) for i, b in enumerate(nonzero) for bp in nonzero[i:]]
    out = []
    for values in itertools.product(A.elements, repeat=len(slots)):
        mapping = {}
        for (b, bp), a in zip(slots, values):
            mapping[(b, bp)] = a
            mapping[(bp, b)] = a
        h = factor_set(A, B, mapping)
        if validate_cocycle(h):
            out.append(h)
    return tuple(out)


def _structured_cocycle(A: FinAbGroup, B: FinAbGroup, coeffs, t) -> FactorSet:
    """Carry cocycles along each cyclic factor of B, shifted by a coboundary.

    h(x, y) = sum_j coeffs[j] * [x_j + y_j >= n_j] + t(x) + t(y) - t(x + y);
    every normalized symmetric cocycle is of this shape.
    """
    mapping = {}
    for x in B.elements:
        for y in B.elements:
            acc = A.zero
            for j, n in enumerate(B.moduli):
                if x[j] + y[j] >= n:
                    acc = A.add(acc, coeffs[j])
            acc = A.add(acc, A.sub(A.add(t[x], t[y]), t[B.add(x, y)]))
            mapping[(x, y)] = acc
    return factor_set(A, B, mapping)


def sample_cocycles(
    A: FinAbGroup, B: FinAbGroup, seed: int, count: int
) -> tuple[FactorSet, ...]:
    """Seeded sample of valid cocycles, for spaces beyond the budget."""
    rng = random.Random(seed)
    seen, out = set(), []
    attempts = 0
    while len(out) < count and attempts < 200 * count:
        attempts += 1
        coeffs = [A.elements[rng.randrange(A.order)] for _ in B.moduli]
        t = {b: A.elements[rng.randrange(A.order)] for b in B.elements}
        t[B.zero] = A.zero
        h = _structured_cocycle(A, B, coeffs, t)
        if h.entries in seen:
            continue
        assert validate_cocycle(h)
        seen.add(h.entries)
        out.append(h)
    return tuple(out)


@cache
def cocycle_class_representatives(A: FinAbGroup, B: FinAbGroup) -> tuple[FactorSet, ...]:
    """One cocycle per cohomology class (min table), deterministic order."""
    cocycles = all_cocycles(A, B)
    nonzero = [b for b in B.elements if b != B.zero]
    coboundaries = set()
    for imgs in itertools.product(A.elements, repeat=len(nonzero)):
        t = {B.zero: A.zero}
        t.update(zip(nonzero, imgs))
        entries = tuple(
            sorted(
                (b, bp, A.sub(A.add(t[b], t[bp]), t[B.add(b, bp)]))
                for b in B.elements
                for bp in B.elements
            )
        )
        coboundaries.add(entries)
    reps = {}
    for h in cocycles:
        shifted = []
        for cob in coboundaries:
            cob_map = {(b, bp): a for b, bp, a in cob}
            shifted.append(
                tuple(
                    sorted(
                        (b, bp, A.add(a, cob_map[(b, bp)]))
                        for b, bp, a in h.entries
                    )
                )
            )
        key = min(shifted)
        reps.setdefault(key, h)
    return tuple(reps[k] for k in sorted(reps))


@cache
def topologized_groups(max_order: int) -> tuple[TopAbGroup, ...]:
    """Every (group class, open core) pair up to the order bound."""
    out = []
    for G in all_groups_up_to_order(max_order):
        for S in all_subgroups(G):
            out.append(TopAbGroup(G, S))
    return tuple(out)


def _cap(seq, max_count):
    if max_count == "all":
        return seq
    return seq[: int(max_count)]


# ---------------------------------------------------------------------------
# task and family specifications


@dataclass(frozen=True)
class FamilySpec:
    max_group_order: int = 4
    max_cocycle_count: object = "all"  # int or "all"
    seed: int = 0
    generators: tuple[str, ...] = ()  # stratum names; () = theorem defaults
    sample_count: int = 400

    def to_json(self) -> dict:
        return {
            "max_group_order": self.max_group_order,
            "max_cocycle_count": self.max_cocycle_count,
            "seed": self.seed,
            "generators": list(self.generators),
            "sample_count": self.sample_count,
        }

    @staticmethod
    def from_json(data) -> "FamilySpec":
        return FamilySpec(
            int(data.get("max_group_order", 4)),
            data.get("max_cocycle_count", "all"),
            int(data.get("seed", 0)),
            tuple(data.get("generators", ())),
            int(data.get("sample_count", 400)),
        )


@dataclass(frozen=True)
class SearchTask:
    theorem_id: str
    dropped_hypotheses: tuple[str, ...] = ()
    family: FamilySpec = FamilySpec()
    stop_at_first: bool = False

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem_id,
            "dropped_hypotheses": list(self.dropped_hypotheses),
            "family": self.family.to_json(),
            "stop_at_first": self.stop_at_first,
        }

    @staticmethod
    def from_json(data) -> "SearchTask":
        return SearchTask(
            data["theorem"],
            tuple(data.get("dropped_hypotheses", ())),
            FamilySpec.from_json(data.get("family", {})),
            bool(data.get("stop_at_first", False)),
        )


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class RowData:
    """An extension row: a cocycle over topologized ends plus a section."""

    A: TopAbGroup
    B: TopAbGroup
    h: FactorSet
    s_entries: tuple[tuple[Element, Element], ...]

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.A, self.B, self.h, self.s_entries))
            self.__dict__["_hash"] = h
            return h

    def realize(self) -> tuple[AlgExtension, Section, Extension]:
        return _realize_row(self)

    def to_json(self) -> dict:
        return {
            "A": jsonio.topgroup_to_json(self.A),
            "B": jsonio.topgroup_to_json(self.B),
            "h": jsonio.cocycle_to_json(self.h),
            "s": [[list(b), list(g)] for b, g in self.s_entries],
        }

    @staticmethod
    def from_json(data) -> "RowData":
        A = jsonio.topgroup_from_json(data["A"])
        B = jsonio.topgroup_from_json(data["B"])
        h = jsonio.cocycle_from_json(data["h"])
        alg = _cached_alg(A, B, h)
        entries = tuple(
            (B.group.reduce(b), alg.G.reduce(g)) for b, g in data["s"]
        )
        return RowData(A, B, h, entries)


@cache
def _cached_alg(A: TopAbGroup, B: TopAbGroup, h: FactorSet) -> AlgExtension:
    return alg_extension_from_cocycle(A, B, h)


@cache
def _realize_row(row: RowData) -> tuple[AlgExtension, Section, Extension]:
    alg = _cached_alg(row.A, row.B, row.h)
    s = Section(row.B.group, alg.G, row.s_entries)
    return alg, s, nagao_topology(alg, s)


def _hom_json(f: Homomorphism) -> list:
    return [list(x) for x in f.gen_images]


def _hom_from(source: FinAbGroup, target: FinAbGroup, data) -> Homomorphism:
    return Homomorphism(source, target, tuple(target.reduce(x) for x in data))


def gamma_lifts(
    alg1: AlgExtension,
    s1: Section,
    alg2: AlgExtension,
    alpha: Homomorphism,
    beta: Homomorphism,
) -> tuple[tuple[tuple[Element, Element], ...], ...]:
    """All middle maps commuting over (alpha, beta), as tables t = gamma o s1."""
    h1 = factor_set_from_section(alg1, s1)
    B1, G2 = alg1.B.group, alg2.G
    fibers: dict[Element, list[Element]] = {}
    for g in G2.elements:
        fibers.setdefault(alg2.pi(g), []).append(g)
    nonzero = [b for b in B1.elements if b != B1.zero]
    out = []
    for choice in itertools.product(*(fibers[beta(b)] for b in nonzero)):
        t = {B1.zero: G2.zero}
        t.update(zip(nonzero, choice))
        ok = True
        for b in B1.elements:
            for bp in B1.elements:
                lhs = G2.sub(G2.add(t[b], t[bp]), t[B1.add(b, bp)])
                if lhs != alg2.iota(alpha(h1(b, bp))):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(tuple(sorted(t.items())))
    return tuple(out)


@dataclass(frozen=True)
class P3Instance:
    """A commutative extension square with sections; gamma given by its lift."""

    row1: RowData
    row2: RowData
    alpha: Homomorphism
    beta: Homomorphism
    lift: tuple[tuple[Element, Element], ...]

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.row1, self.row2, self.alpha, self.beta, self.lift))
            self.__dict__["_hash"] = h
            return h

    def build(self) -> SquareWithSections:
        alg1, s1, e1 = self.row1.realize()
        alg2, s2, e2 = self.row2.realize()
        t = dict(self.lift)
        table = {}
        for a in alg1.A.group.elements:
            for b in alg1.B.group.elements:
                g1 = alg1.G.add(alg1.iota(a), s1(b))
                table[g1] = alg2.G.add(alg2.iota(self.alpha(a)), t[b])
        gamma = hom_from_table(alg1.G, alg2.G, table)
        square = ExtensionSquare(e1, e2, self.alpha, gamma, self.beta)
        return SquareWithSections(square, s1, s2)

    def to_json(self) -> dict:
        return {
            "kind": "square_with_sections",
            "row1": self.row1.to_json(),
            "row2": self.row2.to_json(),
            "alpha": _hom_json(self.alpha),
            "beta": _hom_json(self.beta),
            "lift": [[list(b), list(g)] for b, g in self.lift],
        }

    @staticmethod
    def from_json(data) -> "P3Instance":
        row1 = RowData.from_json(data["row1"])
        row2 = RowData.from_json(data["row2"])
        alg1 = _cached_alg(row1.A, row1.B, row1.h)
        alg2 = _cached_alg(row2.A, row2.B, row2.h)
        alpha = _hom_from(row1.A.group, row2.A.group, data["alpha"])
        beta = _hom_from(row1.B.group, row2.B.group, data["beta"])
        lift = tuple(
            (row1.B.group.reduce(b), alg2.G.reduce(g)) for b, g in data["lift"]
        )
        return P3Instance(row1, row2, alpha, beta, lift)


@dataclass(frozen=True)
class InjSquareInstance:
    """Four injective-candidate maps forming a commuting square."""

    A: TopAbGroup
    B: TopAbGroup
    Ap: TopAbGroup
    Bp: TopAbGroup
    f: Homomorphism
    g: Homomorphism
    alpha: Homomorphism
    beta: Homomorphism

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.A, self.B, self.Ap, self.Bp, self.f, self.g, self.alpha, self.beta))
            self.__dict__["_hash"] = h
            return h

    def build(self) -> InjectiveSquare:
        return InjectiveSquare(
            TopHom(self.f, self.A, self.B),
            TopHom(self.g, self.Ap, self.Bp),
            TopHom(self.alpha, self.A, self.Ap),
            TopHom(self.beta, self.B, self.Bp),
        )

    def to_json(self) -> dict:
        return {
            "kind": "injective_square",
            "A": jsonio.topgroup_to_json(self.A),
            "B": jsonio.topgroup_to_json(self.B),
            "Ap": jsonio.topgroup_to_json(self.Ap),
            "Bp": jsonio.topgroup_to_json(self.Bp),
            "f": _hom_json(self.f),
            "g": _hom_json(self.g),
            "alpha": _hom_json(self.alpha),
            "beta": _hom_json(self.beta),
        }

    @staticmethod
    def from_json(data) -> "InjSquareInstance":
        A = jsonio.topgroup_from_json(data["A"])
        B = jsonio.topgroup_from_json(data["B"])
        Ap = jsonio.topgroup_from_json(data["Ap"])
        Bp = jsonio.topgroup_from_json(data["Bp"])
        return InjSquareInstance(
            A,
            B,
            Ap,
            Bp,
            _hom_from(A.group, B.group, data["f"]),
            _hom_from(Ap.group, Bp.group, data["g"]),
            _hom_from(A.group, Ap.group, data["alpha"]),
            _hom_from(B.group, Bp.group, data["beta"]),
        )


@dataclass(frozen=True)
class ExtensionInstance:
    """A topological extension presented as a row with a section."""

    row: RowData

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash(self.row)
            self.__dict__["_hash"] = h
            return h

    def build(self) -> Extension:
        return self.row.realize()[2]

    def to_json(self) -> dict:
        return {"kind": "extension", "row": self.row.to_json()}

    @staticmethod
    def from_json(data) -> "ExtensionInstance":
        return ExtensionInstance(RowData.from_json(data["row"]))


@dataclass(frozen=True)
class CocycleInstance:
    """A cocycle over topologized ends; section-level facts are quantified."""

    A: TopAbGroup
    B: TopAbGroup
    h: FactorSet

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.A, self.B, self.h))
            self.__dict__["_hash"] = h
            return h

    def alg(self) -> AlgExtension:
        return _cached_alg(self.A, self.B, self.h)

    def to_json(self) -> dict:
        return {
            "kind": "cocycle",
            "A": jsonio.topgroup_to_json(self.A),
            "B": jsonio.topgroup_to_json(self.B),
            "h": jsonio.cocycle_to_json(self.h),
        }

    @staticmethod
    def from_json(data) -> "CocycleInstance":
        return CocycleInstance(
            jsonio.topgroup_from_json(data["A"]),
            jsonio.topgroup_from_json(data["B"]),
            jsonio.cocycle_from_json(data["h"]),
        )


_TRIVIAL_TOP = discrete(FinAbGroup(()))


@dataclass(frozen=True)
class FiveLemmaInstance:
    """A five-term square built from extensions by zero-padding or gluing."""

    shape: str  # "zero_pad" or "glued"
    row1: RowData
    row2: RowData
    chain1: RowData | None  # glued: second extension over row's B (both sides equal)
    v_a: Homomorphism
    v_b: Homomorphism
    lift: tuple[tuple[Element, Element], ...]

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.shape, self.row1, self.row2, self.chain1, self.v_a, self.v_b, self.lift))
            self.__dict__["_hash"] = h
            return h

    def build(self) -> FiveTermSquare:
        if self.shape == "zero_pad":
            alg1, s1, e1 = self.row1.realize()
            alg2, s2, e2 = self.row2.realize()
            t = dict(self.lift)
            table = {}
            for a in alg1.A.group.elements:
                for b in alg1.B.group.elements:
                    g1 = alg1.G.add(alg1.iota(a), s1(b))
                    table[g1] = alg2.G.add(alg2.iota(self.v_a(a)), t[b])
            gamma = hom_from_table(alg1.G, alg2.G, table)
            triv = _TRIVIAL_TOP
            z = triv.group
            r1 = FiveTermRow(
                (triv, e1.A, e1.G, e1.B, triv),
                (
                    zero_hom(z, alg1.A.group),
                    alg1.iota,
                    alg1.pi,
                    zero_hom(alg1.B.group, z),
                ),
            )
            r2 = FiveTermRow(
                (triv, e2.A, e2.G, e2.B, triv),
                (
                    zero_hom(z, alg2.A.group),
                    alg2.iota,
                    alg2.pi,
                    zero_hom(alg2.B.group, z),
                ),
            )
            verts = (
                identity_hom(z),
                self.v_a,
                gamma,
                self.v_b,
                identity_hom(z),
            )
            return FiveTermSquare(r1, r2, verts)
        if self.shape != "glued":
            raise ValueError(f"unknown shape {self.shape}")
        # glued: both 5-term rows come from the same chain E, E'; the middle
        # vertical is a lift over E' with identity outer maps.
        alg, s, e = self.row1.realize()
        algc, sc, ec = self.chain1.realize()
        if algc.A != e.B:
            raise DiagramError("chain must extend the base row's quotient")
        t = dict(self.lift)
        table = {}
        for a in algc.A.group.elements:
            for b in algc.B.group.elements:
                g1 = algc.G.add(algc.iota(a), sc(b))
                table[g1] = algc.G.add(algc.iota(a), t[b])
        gamma_p = hom_from_table(algc.G, algc.G, table)
        triv = _TRIVIAL_TOP
        z = triv.group
        from .groups import compose as _compose

        mid = _compose(algc.iota, alg.pi)
        row = FiveTermRow(
            (e.A, e.G, ec.G, ec.B, triv),
            (alg.iota, mid, algc.pi, zero_hom(algc.B.group, z)),
        )
        verts = (
            identity_hom(alg.A.group),
            identity_hom(alg.G),
            gamma_p,
            identity_hom(algc.B.group),
            identity_hom(z),
        )
        return FiveTermSquare(row, row, verts)

    def to_json(self) -> dict:
        return {
            "kind": "five_lemma",
            "shape": self.shape,
            "row1": self.row1.to_json(),
            "row2": self.row2.to_json(),
            "chain1": self.chain1.to_json() if self.chain1 else None,
            "v_a": _hom_json(self.v_a),
            "v_b": _hom_json(self.v_b),
            "lift": [[list(b), list(g)] for b, g in self.lift],
        }

    @staticmethod
    def from_json(data) -> "FiveLemmaInstance":
        row1 = RowData.from_json(data["row1"])
        row2 = RowData.from_json(data["row2"])
        chain1 = RowData.from_json(data["chain1"]) if data.get("chain1") else None
        alg1 = _cached_alg(row1.A, row1.B, row1.h)
        alg2 = _cached_alg(row2.A, row2.B, row2.h)
        v_a = _hom_from(row1.A.group, row2.A.group, data["v_a"])
        v_b = _hom_from(row1.B.group, row2.B.group, data["v_b"])
        target = (
            _cached_alg(chain1.A, chain1.B, chain1.h).G if chain1 else alg2.G
        )
        src_b = chain1.B.group if chain1 else row1.B.group
        lift = tuple(
            (src_b.reduce(b) if chain1 else row1.B.group.reduce(b), target.reduce(g))
            for b, g in data["lift"]
        )
        return FiveLemmaInstance(data["shape"], row1, row2, chain1, v_a, v_b, lift)


def instance_from_json(data):
    kind = data["kind"]
    if kind == "square_with_sections":
        return P3Instance.from_json(data)
    if kind == "injective_square":
        return InjSquareInstance.from_json(data)
    if kind == "extension":
        return ExtensionInstance.from_json(data)
    if kind == "cocycle":
        return CocycleInstance.from_json(data)
    if kind == "five_lemma":
        return FiveLemmaInstance.from_json(data)
    raise UnknownTheorem(f"unknown instance kind {kind}")


# ---------------------------------------------------------------------------
# family builders


@cache
def _topologizing_sections(alg: AlgExtension) -> tuple[Section, ...]:
    out = []
    for s in enumerate_sections(alg):
        hs = factor_set_from_section(alg, s)
        if is_topologizing(alg.A, alg.B, hs):
            out.append(s)
    return tuple(out)


def _cocycles_for(spec: FamilySpec, A: FinAbGroup, B: FinAbGroup, reps: bool):
    hs = cocycle_class_representatives(A, B) if reps else all_cocycles(A, B)
    return _cap(hs, spec.max_cocycle_count)


def _row_pool(spec: FamilySpec, max_order: int, reps: bool) -> list[RowData]:
    rows = []
    for A_top in topologized_groups(max_order):
        for B_top in topologized_groups(max_order):
            for h in _cocycles_for(spec, A_top.group, B_top.group, reps):
                alg = _cached_alg(A_top, B_top, h)
                for s in _topologizing_sections(alg):
                    rows.append(RowData(A_top, B_top, h, s.entries))
    return rows


def _first_topologizing_row(spec, A_top, B_top, h) -> RowData | None:
    alg = _cached_alg(A_top, B_top, h)
    secs = _topologizing_sections(alg)
    if not secs:
        return None
    return RowData(A_top, B_top, h, secs[0].entries)


@cache
def p3_family(spec: FamilySpec) -> list[tuple[str, object]]:
    """Shared family for the square-with-sections theorems.

    Strata: exhaustive squares over groups of order <= 2; exhaustive
    same-extension squares (identity outer verticals, all section pairs) up to
    the order bound; and a seeded sample of the full square space.
    """
    strata = spec.generators or ("squares_small", "diagonal", "sampled")
    out: list[tuple[str, object]] = []

    if "squares_small" in strata:
        small = _row_pool(spec, min(2, spec.max_group_order), reps=False)
        for r1 in small:
            for r2 in small:
                alg1 = _cached_alg(r1.A, r1.B, r1.h)
                alg2 = _cached_alg(r2.A, r2.B, r2.h)
                s1 = Section(r1.B.group, alg1.G, r1.s_entries)
                for alpha in all_homs(r1.A.group, r2.A.group):
                    for beta in all_homs(r1.B.group, r2.B.group):
                        for lift in gamma_lifts(alg1, s1, alg2, alpha, beta):
                            out.append(
                                ("squares_small", P3Instance(r1, r2, alpha, beta, lift))
                            )

    if "diagonal" in strata:
        for A_top in topologized_groups(spec.max_group_order):
            for B_top in topologized_groups(spec.max_group_order):
                for h in _cocycles_for(spec, A_top.group, B_top.group, True):
                    alg = _cached_alg(A_top, B_top, h)
                    secs = _topologizing_sections(alg)
                    if not secs:
                        continue
                    r1 = RowData(A_top, B_top, h, secs[0].entries)
                    ida = identity_hom(A_top.group)
                    idb = identity_hom(B_top.group)
                    for s2 in secs:
                        r2 = RowData(A_top, B_top, h, s2.entries)
                        out.append(
                            ("diagonal", P3Instance(r1, r2, ida, idb, r1.s_entries))
                        )

    if "sampled" in strata:
        rng = random.Random(spec.seed)
        tops = topologized_groups(spec.max_group_order)
        made = 0
        attempts = 0
        while made < spec.sample_count and attempts < 40 * spec.sample_count:
            attempts += 1
            a1, b1 = rng.choice(tops), rng.choice(tops)
            a2, b2 = rng.choice(tops), rng.choice(tops)
            h1 = rng.choice(all_cocycles(a1.group, b1.group))
            h2 = rng.choice(all_cocycles(a2.group, b2.group))
            alg1, alg2 = _cached_alg(a1, b1, h1), _cached_alg(a2, b2, h2)
            s1s, s2s = _topologizing_sections(alg1), _topologizing_sections(alg2)
            if not s1s or not s2s:
                continue
            s1, s2 = rng.choice(s1s), rng.choice(s2s)
            alphas = list(all_homs(a1.group, a2.group))
            betas = list(all_homs(b1.group, b2.group))
            alpha, beta = rng.choice(alphas), rng.choice(betas)
            lifts = gamma_lifts(alg1, s1, alg2, alpha, beta)
            if not lifts:
                continue
            lift = lifts[rng.randrange(len(lifts))]
            r1 = RowData(a1, b1, h1, s1.entries)
            r2 = RowData(a2, b2, h2, s2.entries)
            out.append(("sampled", P3Instance(r1, r2, alpha, beta, lift)))
            made += 1

    return out


@cache
def inj_family(spec: FamilySpec) -> list[tuple[str, object]]:
    strata = spec.generators or ("squares_small", "sampled")
    out: list[tuple[str, object]] = []

    def commuting_squares(tops):
        for A in tops:
            for B in tops:
                for f in all_homs(A.group, B.group):
                    for Ap in tops:
                        alphas = list(all_homs(A.group, Ap.group))
                        for Bp in tops:
                            for g in all_homs(Ap.group, Bp.group):
                                for alpha in alphas:
                                    for beta in all_homs(B.group, Bp.group):
                                        ok = all(
                                            beta(f(x)) == g(alpha(x))
                                            for x in A.group.elements
                                        )
                                        if ok:
                                            yield InjSquareInstance(
                                                A, B, Ap, Bp, f, g, alpha, beta
                                            )

    if "squares_small" in strata:
        tops = topologized_groups(min(2, spec.max_group_order))
        for inst in commuting_squares(tops):
            out.append(("squares_small", inst))

    if "sampled" in strata:
        rng = random.Random(spec.seed)
        tops = topologized_groups(spec.max_group_order)
        made, attempts = 0, 0
        while made < spec.sample_count and attempts < 40 * spec.sample_count:
            attempts += 1
            A, B, Ap, Bp = (rng.choice(tops) for _ in range(4))
            f = rng.choice(list(all_homs(A.group, B.group)))
            g = rng.choice(list(all_homs(Ap.group, Bp.group)))
            alpha = rng.choice(list(all_homs(A.group, Ap.group)))
            betas = [
                b
                for b in all_homs(B.group, Bp.group)
                if all(b(f(x)) == g(alpha(x)) for x in A.group.elements)
            ]
            if not betas:
                continue
            beta = rng.choice(betas)
            out.append(("sampled", InjSquareInstance(A, B, Ap, Bp, f, g, alpha, beta)))
            made += 1
    return out


@cache
def extension_family(spec: FamilySpec) -> list[tuple[str, object]]:
    """Every topological extension up to the bound, deduplicated by core."""
    out: list[tuple[str, object]] = []
    for A_top in topologized_groups(spec.max_group_order):
        for B_top in topologized_groups(spec.max_group_order):
            for h in _cocycles_for(spec, A_top.group, B_top.group, False):
                alg = _cached_alg(A_top, B_top, h)
                seen_cores = set()
                for s in _topologizing_sections(alg):
                    core = nagao_core(alg, s).elements
                    if core in seen_cores:
                        continue
                    seen_cores.add(core)
                    out.append(
                        ("extensions", ExtensionInstance(RowData(A_top, B_top, h, s.entries)))
                    )
    return out


@cache
def cocycle_family(spec: FamilySpec, b_discrete_only: bool = False):
    out: list[tuple[str, object]] = []
    for A_top in topologized_groups(spec.max_group_order):
        for B_top in topologized_groups(spec.max_group_order):
            if b_discrete_only and not is_discrete(B_top):
                continue
            for h in _cocycles_for(spec, A_top.group, B_top.group, False):
                out.append(("cocycles", CocycleInstance(A_top, B_top, h)))
    return out


@cache
def five_lemma_family(spec: FamilySpec) -> list[tuple[str, object]]:
    strata = spec.generators or ("zero_pad_small", "zero_pad_diagonal", "glued_small", "sampled")
    out: list[tuple[str, object]] = []

    if "zero_pad_small" in strata:
        rows = _row_pool(spec, min(2, spec.max_group_order), reps=False)
        for r1 in rows:
            for r2 in rows:
                alg1 = _cached_alg(r1.A, r1.B, r1.h)
                alg2 = _cached_alg(r2.A, r2.B, r2.h)
                s1 = Section(r1.B.group, alg1.G, r1.s_entries)
                for v_a in all_homs(r1.A.group, r2.A.group):
                    for v_b in all_homs(r1.B.group, r2.B.group):
                        for lift in gamma_lifts(alg1, s1, alg2, v_a, v_b):
                            out.append(
                                (
                                    "zero_pad_small",
                                    FiveLemmaInstance(
                                        "zero_pad", r1, r2, None, v_a, v_b, lift
                                    ),
                                )
                            )

    if "zero_pad_diagonal" in strata:
        for A_top in topologized_groups(spec.max_group_order):
            for B_top in topologized_groups(spec.max_group_order):
                for h in _cocycles_for(spec, A_top.group, B_top.group, True):
                    alg = _cached_alg(A_top, B_top, h)
                    secs = _topologizing_sections(alg)
                    if not secs:
                        continue
                    r = RowData(A_top, B_top, h, secs[0].entries)
                    s1 = Section(B_top.group, alg.G, r.s_entries)
                    ida = identity_hom(A_top.group)
                    idb = identity_hom(B_top.group)
                    for lift in gamma_lifts(alg, s1, alg, ida, idb):
                        out.append(
                            (
                                "zero_pad_diagonal",
                                FiveLemmaInstance("zero_pad", r, r, None, ida, idb, lift),
                            )
                        )

    if "glued_small" in strata:
        rows = _row_pool(spec, min(2, spec.max_group_order), reps=False)
        for base in rows:
            alg = _cached_alg(base.A, base.B, base.h)
            e_b = base.B
            for C_top in topologized_groups(min(2, spec.max_group_order)):
                for hc in all_cocycles(e_b.group, C_top.group):
                    algc = _cached_alg(e_b, C_top, hc)
                    for sc in _topologizing_sections(algc):
                        chain = RowData(e_b, C_top, hc, sc.entries)
                        idb = identity_hom(e_b.group)
                        idc = identity_hom(C_top.group)
                        for lift in gamma_lifts(algc, sc, algc, idb, idc):
                            out.append(
                                (
                                    "glued_small",
                                    FiveLemmaInstance(
                                        "glued", base, base, chain,
                                        identity_hom(base.A.group),
                                        identity_hom(e_b.group),
                                        lift,
                                    ),
                                )
                            )

    if "sampled" in strata:
        rng = random.Random(spec.seed)
        tops = topologized_groups(spec.max_group_order)
        made, attempts = 0, 0
        while made < spec.sample_count and attempts < 40 * spec.sample_count:
            attempts += 1
            a1, b1 = rng.choice(tops), rng.choice(tops)
            a2, b2 = rng.choice(tops), rng.choice(tops)
            h1 = rng.choice(all_cocycles(a1.group, b1.group))
            h2 = rng.choice(all_cocycles(a2.group, b2.group))
            alg1, alg2 = _cached_alg(a1, b1, h1), _cached_alg(a2, b2, h2)
            s1s, s2s = _topologizing_sections(alg1), _topologizing_sections(alg2)
            if not s1s or not s2s:
                continue
            s1, s2 = rng.choice(s1s), rng.choice(s2s)
            v_a = rng.choice(list(all_homs(a1.group, a2.group)))
            v_b = rng.choice(list(all_homs(b1.group, b2.group)))
            lifts = gamma_lifts(alg1, s1, alg2, v_a, v_b)
            if not lifts:
                continue
            lift = lifts[rng.randrange(len(lifts))]
            out.append(
                (
                    "sampled",
                    FiveLemmaInstance(
                        "zero_pad",
                        RowData(a1, b1, h1, s1.entries),
                        RowData(a2, b2, h2, s2.entries),
                        None,
                        v_a,
                        v_b,
                        lift,
                    ),
                )
            )
            made += 1
    return out


# ---------------------------------------------------------------------------
# evaluators


def _eval_p3(inst: P3Instance, dropped: frozenset[str]) -> VerificationReport:
    return verify_p3_generalized(inst.build(), dropped, False, inst.to_json())


def _eval_open_fibers(inst: P3Instance, dropped: frozenset[str]) -> VerificationReport:
    return verify_open_fibers(inst.build(), dropped, False, inst.to_json())


def _eval_p3_discrete(inst: P3Instance, dropped: frozenset[str]) -> VerificationReport:
    return verify_p3_discrete(inst.build(), dropped, False, inst.to_json())


def _eval_fln(inst: P3Instance, dropped: frozenset[str]) -> VerificationReport:
    return verify_five_lemma_nagao(inst.build(), dropped, False, inst.to_json())


def _eval_inj(inst: InjSquareInstance, dropped: frozenset[str]) -> VerificationReport:
    return verify_lemma_strictness_injectivity(inst.build(), dropped, False, inst.to_json())


def _eval_haus(inst: ExtensionInstance, dropped: frozenset[str]) -> VerificationReport:
    return verify_haus_exactness(inst.build(), dropped, False, inst.to_json())


def _eval_flt(inst: FiveLemmaInstance, dropped: frozenset[str]) -> VerificationReport:
    return verify_topological_five_lemma(inst.build(), dropped, False, inst.to_json())


def _eval_flt_relaxed(inst: FiveLemmaInstance, dropped: frozenset[str]) -> VerificationReport:
    return verify_topological_five_lemma(
        inst.build(), dropped, False, inst.to_json(), relaxed=True
    )


def _eval_comparison(inst: CocycleInstance, dropped: frozenset[str]) -> VerificationReport:
    """Core equality vs comparison-map continuity, over all section pairs."""
    alg = inst.alg()
    secs = _topologizing_sections(alg)
    cores = [nagao_core(alg, s).element_set for s in secs]
    core_a = inst.A.core_set
    nb = list(inst.B.open_core)
    details = []
    ok = True
    first_bad = None
    for i in range(len(secs)):
        for j in range(i, len(secs)):
            by_cores = cores[i] == cores[j]
            f = comparison_map(alg, secs[i], secs[j])
            by_map = all(f[b] in core_a for b in nb)
            if by_cores != by_map:
                ok = False
                if first_bad is None:
                    first_bad = (i, j)
    details.append(("criteria_agree_on_all_pairs", ok))
    if first_bad is not None:
        details.append((f"disagreeing_pair_{first_bad[0]}_{first_bad[1]}", False))
    return VerificationReport(
        "nagao_comparison",
        (("has_topologizing_sections", bool(secs)),),
        all(okk for _, okk in details) if secs else None,
        tuple(details),
        instance=inst.to_json(),
    )


def _eval_choice_discrete(inst: CocycleInstance, dropped: frozenset[str]) -> VerificationReport:
    alg = inst.alg()
    hyps = (("b_discrete", is_discrete(inst.B)),)
    unmet = [n for n, okk in hyps if not okk and n not in dropped]
    if unmet:
        return VerificationReport(
            "choice_discrete", hyps, None, (), instance=inst.to_json()
        )
    secs = _topologizing_sections(alg)
    cores = {nagao_core(alg, s).elements for s in secs}
    details = (("unique_core_across_sections", len(cores) <= 1),)
    return VerificationReport(
        "choice_discrete",
        hyps,
        all(okk for _, okk in details),
        details,
        instance=inst.to_json(),
    )


def _eval_topologizable(inst: CocycleInstance, dropped: frozenset[str]) -> VerificationReport:
    alg = inst.alg()
    secs = _topologizing_sections(alg)
    details = (("topologizing_section_exists", bool(secs)),)
    return VerificationReport(
        "topologizable",
        (),
        bool(secs),
        details,
        instance=inst.to_json(),
    )


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class TheoremSpec:
    theorem_id: str
    droppable: tuple[str, ...]
    build_family: object
    evaluate: object
    expect_zero_failures: bool


THEOREMS: dict[str, TheoremSpec] = {}


def _register(tid, droppable, family, evaluate, expect_zero=True):
    THEOREMS[tid] = TheoremSpec(tid, tuple(droppable), family, evaluate, expect_zero)


_register(
    "p3_generalized",
    ("alpha_continuous", "beta_continuous", "sections_compatible"),
    p3_family,
    _eval_p3,
)
_register("open_fibers", ("sigma_open_fibers",), p3_family, _eval_open_fibers)
_register("p3_discrete", ("case_gate",), p3_family, _eval_p3_discrete)
_register(
    "five_lemma_nagao",
    ("alpha_continuous", "beta_continuous", "case_gate"),
    p3_family,
    _eval_fln,
)
_register(
    "strictness_injectivity",
    ("maps_injective", "maps_continuous", "f_strict", "g_strict", "beta_strict"),
    inj_family,
    _eval_inj,
)
_register("haus_exactness", ("case_gate",), extension_family, _eval_haus)
_register(
    "five_lemma_topological",
    (
        "rows_strict_exact",
        "beta_delta_top_isos",
        "epsilon_injective",
        "alpha_surjective",
        "case_gate",
    ),
    five_lemma_family,
    _eval_flt,
)
_register(
    "five_lemma_topological_relaxed",
    (
        "rows_strict_exact",
        "beta_delta_continuous_bijections",
        "epsilon_injective",
        "alpha_surjective",
        "case_gate",
    ),
    five_lemma_family,
    _eval_flt_relaxed,
)
_register("nagao_comparison", (), cocycle_family, _eval_comparison)
_register(
    "choice_discrete",
    (),
    lambda spec: cocycle_family(spec, b_discrete_only=True),
    _eval_choice_discrete,
)
_register("topologizable", (), cocycle_family, _eval_topologizable, expect_zero=False)


# ---------------------------------------------------------------------------
# shrinking


def _with_cores(inst, cores):
    """Rebuild an instance with replacement open cores, or None if invalid."""
    try:
        if isinstance(inst, P3Instance):
            r1 = RowData(
                TopAbGroup(inst.row1.A.group, cores[0]),
                TopAbGroup(inst.row1.B.group, cores[1]),
                inst.row1.h,
                inst.row1.s_entries,
            )
            r2 = RowData(
                TopAbGroup(inst.row2.A.group, cores[2]),
                TopAbGroup(inst.row2.B.group, cores[3]),
                inst.row2.h,
                inst.row2.s_entries,
            )
            new = P3Instance(r1, r2, inst.alpha, inst.beta, inst.lift)
            new.build()
            return new
        if isinstance(inst, ExtensionInstance):
            r = RowData(
                TopAbGroup(inst.row.A.group, cores[0]),
                TopAbGroup(inst.row.B.group, cores[1]),
                inst.row.h,
                inst.row.s_entries,
            )
            new = ExtensionInstance(r)
            new.build()
            return new
    except (NotTopologizing, DiagramError, InvalidSection):
        return None
    return None


def _instance_cores(inst):
    if isinstance(inst, P3Instance):
        return (
            inst.row1.A.open_core,
            inst.row1.B.open_core,
            inst.row2.A.open_core,
            inst.row2.B.open_core,
        )
    if isinstance(inst, ExtensionInstance):
        return (inst.row.A.open_core, inst.row.B.open_core)
    return None


def shrink_witness(inst, evaluate, dropped):
    """Greedily shrink open cores while the conclusion failure persists."""
    cores = _instance_cores(inst)
    if cores is None:
        return inst
    current = inst
    improved = True
    while improved:
        improved = False
        cores = _instance_cores(current)
        for i, core in enumerate(cores):
            for cand in all_subgroups(core.parent):
                if cand.order >= core.order:
                    continue
                trial_cores = list(cores)
                trial_cores[i] = cand
                trial = _with_cores(current, tuple(trial_cores))
                if trial is None:
                    continue
                rep = evaluate(trial, dropped)
                if rep.conclusion_checked is False:
                    current = trial
                    improved = True
                    break
            if improved:
                break
    return current


# ---------------------------------------------------------------------------
# runner


@dataclass
class RunResult:
    task: SearchTask
    strata_counts: dict
    evaluated: int
    filtered: int
    failures: list[VerificationReport] = field(default_factory=list)

    @property
    def failure_count(self) -> int:
        return len(self.failures)

    def summary_json(self) -> dict:
        return {
            "type": "summary",
            "task": self.task.to_json(),
            "strata": self.strata_counts,
            "evaluated": self.evaluated,
            "filtered": self.filtered,
            "failures": self.failure_count,
        }

    def to_jsonl(self) -> str:
        lines = [jsonio.dumps({"type": "failure", **r.to_json()}) for r in self.failures]
        lines.append(jsonio.dumps(self.summary_json()))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        t = self.task
        head = [
            f"# {t.theorem_id}",
            "",
            f"- dropped hypotheses: {', '.join(t.dropped_hypotheses) or 'none'}",
            f"- family: max order {t.family.max_group_order}, seed {t.family.seed}",
            f"- instances evaluated: {self.evaluated}"
            f" (hypothesis-filtered: {self.filtered})",
            f"- conclusion failures: {self.failure_count}",
            "",
            "| stratum | generated |",
            "|---|---|",
        ]
        for name in sorted(self.strata_counts):
            head.append(f"| {name} | {self.strata_counts[name]} |")
        if self.failures:
            head += ["", "## failures", ""]
            for i, r in enumerate(self.failures):
                bad = [n for n, ok in r.details if not ok]
                head.append(f"- failure {i}: broken conclusions: {', '.join(bad)}")
            head += ["", "## model-collapse notes", ""]
            head += [f"- {note}" for note in self.failures[0].model_collapse]
        return "\n".join(head) + "\n"


def _check_task(task: SearchTask) -> TheoremSpec:
    if task.theorem_id not in THEOREMS:
        raise UnknownTheorem(f"unknown theorem {task.theorem_id!r}")
    info = THEOREMS[task.theorem_id]
    for h in task.dropped_hypotheses:
        if h not in info.droppable:
            raise UnknownHypothesis(
                f"{h!r} is not a droppable hypothesis of {task.theorem_id}"
            )
    return info


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("TOPAB_THREADS", "1")))
    except ValueError:
        return 1


def _evaluate_slice(task_json: dict, lo: int, hi: int) -> list[tuple[int, dict, bool]]:
    """Re-generate the family in a worker and evaluate an index slice."""
    task = SearchTask.from_json(task_json)
    info = _check_task(task)
    family = info.build_family(task.family)
    dropped = frozenset(task.dropped_hypotheses)
    out = []
    for idx in range(lo, min(hi, len(family))):
        _, inst = family[idx]
        rep = info.evaluate(inst, dropped)
        out.append((idx, rep.to_json(), rep.conclusion_checked is None))
    return out


def run_search(task: SearchTask, threads: int | None = None) -> RunResult:
    """Evaluate a theorem over its family; failures become witnesses."""
    info = _check_task(task)
    family = info.build_family(task.family)
    dropped = frozenset(task.dropped_hypotheses)
    strata_counts: dict[str, int] = {}
    for stratum, _ in family:
        strata_counts[stratum] = strata_counts.get(stratum, 0) + 1

    threads = _worker_count() if threads is None else max(1, threads)
    evaluated = filtered = 0
    failures: list[VerificationReport] = []

    def handle(idx: int, rep: VerificationReport):
        nonlocal evaluated, filtered
        if rep.conclusion_checked is None:
            filtered += 1
            return False
        evaluated += 1
        if rep.conclusion_checked is False:
            _, inst = family[idx]
            small = shrink_witness(inst, info.evaluate, dropped)
            final = info.evaluate(small, dropped)
            final.witness = small.to_json()
            failures.append(final)
            return True
        return False

    if threads == 1 or len(family) < 64:
        for idx, (_, inst) in enumerate(family):
            rep = info.evaluate(inst, dropped)
            found = handle(idx, rep)
            if found and task.stop_at_first:
                break
    else:
        chunk = (len(family) + threads - 1) // threads
        spans = [(i, min(i + chunk, len(family))) for i in range(0, len(family), chunk)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_evaluate_slice, task.to_json(), lo, hi)
                for lo, hi in spans
            ]
            results: list[tuple[int, dict, bool]] = []
            for f in futures:
                results.extend(f.result())
        results.sort(key=lambda r: r[0])
        stop = False
        for idx, rep_json, was_filtered in results:
            if stop:
                break
            if was_filtered:
                filtered += 1
                continue
            evaluated += 1
            if rep_json["conclusion"] is False:
                _, inst = family[idx]
                small = shrink_witness(inst, info.evaluate, dropped)
                final = info.evaluate(small, dropped)
                final.witness = small.to_json()
                failures.append(final)
                if task.stop_at_first:
                    stop = True

    return RunResult(task, strata_counts, evaluated, filtered, failures)


def replay_witness(theorem_id: str, witness_json: dict, dropped=()) -> VerificationReport:
    """Re-run a reported witness through the verifier in isolation."""
    info = _check_task(SearchTask(theorem_id, tuple(dropped)))
    inst = instance_from_json(witness_json)
    return info.evaluate(inst, frozenset(dropped))
