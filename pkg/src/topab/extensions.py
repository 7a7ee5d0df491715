"""Group extensions via factor sets, sections, and section-induced topologies.

An algebraic extension 0 -> A -> G -> B -> 0 is encoded by a normalized
symmetric 2-cocycle h: B x B -> A.  A set-theoretic section s of the
projection recovers such a cocycle, the cocycle twists A x B into a group
isomorphic to G, and when the cocycle maps N_B x N_B into N_A the section
induces a group topology on G (open core = theta_s(N_A x N_B)) making the
sequence a topological extension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cache, cached_property
from typing import Iterator

from .errors import (
    InvalidCocycle,
    InvalidSection,
    NotAnExtension,
    NotTopologizing,
    DiagramError,
    ValueOutsideIotaImage,
)
from .groups import (
    Element,
    FinAbGroup,
    Homomorphism,
    Subgroup,
    group_structure,
    hom_from_table,
    is_exact_at,
    quotient,
    subgroup,
    subgroup_as_group,
)
from .topology import TopAbGroup, TopHom, is_continuous, is_strict, separation

# the pair (a, b) with a in A, b in B
Pair = tuple[Element, Element]


@dataclass(frozen=True)
class FactorSet:
    """A normalized symmetric 2-cocycle h: B x B -> A, stored as a full table."""

    A: FinAbGroup
    B: FinAbGroup
    entries: tuple[tuple[Element, Element, Element], ...]

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.A, self.B, self.entries))
            self.__dict__["_hash"] = h
            return h

    def __post_init__(self):
        table = {}
        for b, bp, a in self.entries:
            table[(self.B.check_element(b), self.B.check_element(bp))] = (
                self.A.check_element(a)
            )
        if len(table) != self.B.order**2:
            raise InvalidCocycle("factor set table must cover all of B x B")
        canon = tuple(sorted((b, bp, a) for (b, bp), a in table.items()))
        object.__setattr__(self, "entries", canon)

    @cached_property
    def table(self) -> dict[tuple[Element, Element], Element]:
        return {(b, bp): a for b, bp, a in self.entries}

    def __call__(self, b: Element, bp: Element) -> Element:
        return self.table[(b, bp)]


def factor_set(A: FinAbGroup, B: FinAbGroup, mapping: dict) -> FactorSet:
    """Build a factor set from a partial mapping; unspecified pairs are zero."""
    entries = []
    for b in B.elements:
        for bp in B.elements:
            a = mapping.get((b, bp), A.zero)
            entries.append((b, bp, A.reduce(a)))
    return FactorSet(A, B, tuple(entries))


def zero_factor_set(A: FinAbGroup, B: FinAbGroup) -> FactorSet:
    return factor_set(A, B, {})


@cache
def cocycle_violations(h: FactorSet) -> tuple[str, ...]:
    """Diagnostics: normalization, symmetry, and cocycle-identity failures."""
    A, B = h.A, h.B
    out = []
    for b in B.elements:
        if h(b, B.zero) != A.zero or h(B.zero, b) != A.zero:
            out.append(f"normalization fails at {b}")
    for b in B.elements:
        for bp in B.elements:
            if h(b, bp) != h(bp, b):
                out.append(f"symmetry fails at ({b}, {bp})")
    for b in B.elements:
        for bp in B.elements:
            for bpp in B.elements:
                lhs = A.add(h(b, bp), h(B.add(b, bp), bpp))
                rhs = A.add(h(bp, bpp), h(b, B.add(bp, bpp)))
                if lhs != rhs:
                    out.append(f"cocycle identity fails at ({b}, {bp}, {bpp})")
    return tuple(out)


def validate_cocycle(h: FactorSet) -> bool:
    return not cocycle_violations(h)


@dataclass(frozen=True)
class TwistedGroup:
    """A x B under (a,b) + (a',b') = (a + a' + h(b,b'), b + b')."""

    h: FactorSet

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash(self.h)
            self.__dict__["_hash"] = h
            return h

    def __post_init__(self):
        bad = cocycle_violations(self.h)
        if bad:
            raise InvalidCocycle(bad[0])

    @property
    def A(self) -> FinAbGroup:
        return self.h.A

    @property
    def B(self) -> FinAbGroup:
        return self.h.B

    @cached_property
    def elements(self) -> tuple[Pair, ...]:
        return tuple(
            (a, b) for a in self.A.elements for b in self.B.elements
        )

    @property
    def order(self) -> int:
        return self.A.order * self.B.order

    @property
    def zero(self) -> Pair:
        return (self.A.zero, self.B.zero)

    def add(self, x: Pair, y: Pair) -> Pair:
        (a, b), (ap, bp) = x, y
        return (self.A.add(self.A.add(a, ap), self.h(b, bp)), self.B.add(b, bp))

    def neg(self, x: Pair) -> Pair:
        a, b = x
        nb = self.B.neg(b)
        return (self.A.neg(self.A.add(a, self.h(b, nb))), nb)

    def include(self, a: Element) -> Pair:
        return (a, self.B.zero)

    def project(self, x: Pair) -> Element:
        return x[1]

    def check_group_laws(self) -> None:
        els = self.elements
        for x in els:
            assert self.add(self.zero, x) == x
            assert self.add(x, self.neg(x)) == self.zero
            for y in els:
                assert self.add(x, y) == self.add(y, x)
                for z in els:
                    assert self.add(self.add(x, y), z) == self.add(x, self.add(y, z))


def twisted_group(A: FinAbGroup, B: FinAbGroup, h: FactorSet) -> TwistedGroup:
    if h.A != A or h.B != B:
        raise InvalidCocycle("factor set does not match the given groups")
    return TwistedGroup(h)


@dataclass(frozen=True)
class Section:
    """A set-theoretic section table of a projection G -> B, with s(0) = 0."""

    B: FinAbGroup
    G: FinAbGroup
    entries: tuple[tuple[Element, Element], ...]

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.B, self.G, self.entries))
            self.__dict__["_hash"] = h
            return h

    def __post_init__(self):
        table = {self.B.check_element(b): self.G.check_element(g) for b, g in self.entries}
        if len(table) != self.B.order:
            raise InvalidSection("section table must cover all of B")
        if table[self.B.zero] != self.G.zero:
            raise InvalidSection("a section must send 0 to 0")
        object.__setattr__(self, "entries", tuple(sorted(table.items())))

    @cached_property
    def table(self) -> dict[Element, Element]:
        return dict(self.entries)

    def __call__(self, b: Element) -> Element:
        return self.table[b]


@dataclass(frozen=True)
class AlgExtension:
    """Exact 0 -> A -> G -> B -> 0 with topologies on the ends but not on G."""

    A: TopAbGroup
    G: FinAbGroup
    B: TopAbGroup
    iota: Homomorphism
    pi: Homomorphism

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.A, self.G, self.B, self.iota, self.pi))
            self.__dict__["_hash"] = h
            return h

    def __post_init__(self):
        if self.iota.source != self.A.group or self.iota.target != self.G:
            raise NotAnExtension("iota must map A into G")
        if self.pi.source != self.G or self.pi.target != self.B.group:
            raise NotAnExtension("pi must map G onto B")
        if not self.iota.is_injective():
            raise NotAnExtension("iota is not injective")
        if not self.pi.is_surjective():
            raise NotAnExtension("pi is not surjective")
        if not is_exact_at(self.iota, self.pi):
            raise NotAnExtension("image of iota differs from kernel of pi")

    @cached_property
    def iota_inverse(self) -> dict[Element, Element]:
        return {self.iota(a): a for a in self.A.group.elements}

    def pull_back(self, g: Element) -> Element:
        try:
            return self.iota_inverse[g]
        except KeyError:
            raise ValueOutsideIotaImage(f"{g} is not in the image of iota") from None


@dataclass(frozen=True)
class Extension:
    """A topological extension: exact, with iota and pi continuous and strict."""

    A: TopAbGroup
    G: TopAbGroup
    B: TopAbGroup
    iota: TopHom
    pi: TopHom

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.A, self.G, self.B))
            self.__dict__["_hash"] = h
            return h

    def __post_init__(self):
        if self.iota.source != self.A or self.iota.target != self.G:
            raise NotAnExtension("iota endpoints are wrong")
        if self.pi.source != self.G or self.pi.target != self.B:
            raise NotAnExtension("pi endpoints are wrong")
        # algebraic exactness
        AlgExtension(self.A, self.G.group, self.B, self.iota.map, self.pi.map)
        for name, f in (("iota", self.iota), ("pi", self.pi)):
            if not is_continuous(f):
                raise NotAnExtension(f"{name} is not continuous")
            if not is_strict(f):
                raise NotAnExtension(f"{name} is not strict")

    @cached_property
    def alg(self) -> AlgExtension:
        return AlgExtension(self.A, self.G.group, self.B, self.iota.map, self.pi.map)


def _as_alg(ext) -> AlgExtension:
    return ext.alg if isinstance(ext, Extension) else ext


def section_for(ext, mapping: dict[Element, Element]) -> Section:
    alg = _as_alg(ext)
    s = Section(alg.B.group, alg.G, tuple(mapping.items()))
    for b in alg.B.group.elements:
        if alg.pi(s(b)) != b:
            raise InvalidSection(f"pi(s({b})) = {alg.pi(s(b))} != {b}")
    return s


def enumerate_sections(ext) -> Iterator[Section]:
    """All sections with s(0) = 0; there are |A| ** (|B| - 1) of them."""
    alg = _as_alg(ext)
    fibers = {b: [] for b in alg.B.group.elements}
    for g in alg.G.elements:
        fibers[alg.pi(g)].append(g)
    nonzero = [b for b in alg.B.group.elements if b != alg.B.group.zero]
    for choice in itertools.product(*(fibers[b] for b in nonzero)):
        mapping = {alg.B.group.zero: alg.G.zero}
        mapping.update(dict(zip(nonzero, choice)))
        yield Section(alg.B.group, alg.G, tuple(mapping.items()))


def canonical_section(ext) -> Section:
    """The section picking the lexicographically least preimage of each b."""
    alg = _as_alg(ext)
    mapping = {alg.B.group.zero: alg.G.zero}
    for g in alg.G.elements:
        mapping.setdefault(alg.pi(g), g)
    return Section(alg.B.group, alg.G, tuple(mapping.items()))


@cache
def factor_set_from_section(ext, s: Section) -> FactorSet:
    """h_s(b, b') = s(b) + s(b') - s(b + b'), pulled back through iota."""
    alg = _as_alg(ext)
    if s.B != alg.B.group or s.G != alg.G:
        raise InvalidSection("section does not belong to this extension")
    G, B = alg.G, alg.B.group
    entries = []
    for b in B.elements:
        for bp in B.elements:
            g = G.sub(G.add(s(b), s(bp)), s(B.add(b, bp)))
            entries.append((b, bp, alg.pull_back(g)))
    return FactorSet(alg.A.group, B, tuple(entries))


@dataclass(frozen=True)
class ThetaIso:
    """The isomorphism (A x B, +_h_s) -> G, (a, b) -> iota(a) + s(b)."""

    twisted: TwistedGroup
    mapping: dict  # Pair -> Element of G

    @cached_property
    def inverse(self) -> dict:
        return {g: p for p, g in self.mapping.items()}

    def __call__(self, p: Pair) -> Element:
        return self.mapping[p]


@cache
def theta(ext, s: Section, check: bool = True) -> ThetaIso:
    alg = _as_alg(ext)
    h = factor_set_from_section(alg, s)
    tw = TwistedGroup(h)
    G = alg.G
    mapping = {
        (a, b): G.add(alg.iota(a), s(b))
        for a in alg.A.group.elements
        for b in alg.B.group.elements
    }
    assert len(set(mapping.values())) == G.order, "theta must be bijective"
    if check:
        for x in tw.elements:
            for y in tw.elements:
                assert mapping[tw.add(x, y)] == G.add(mapping[x], mapping[y])
    return ThetaIso(tw, mapping)


@dataclass(frozen=True)
class Realization:
    """A cocycle realized as an honest extension of canonical-form groups."""

    twisted: TwistedGroup
    G: FinAbGroup
    from_pair: dict  # Pair -> Element of G
    to_pair: dict  # Element of G -> Pair
    iota: Homomorphism
    pi: Homomorphism


def realize_cocycle(A: FinAbGroup, B: FinAbGroup, h: FactorSet) -> Realization:
    """Canonicalize the twisted group and return the extension data around it."""
    tw = twisted_group(A, B, h)
    factors, basis = group_structure(list(tw.elements), tw.add, tw.zero)
    G = FinAbGroup(factors)
    from_coords = {}
    for y in G.elements:
        acc = tw.zero
        for c, b in zip(y, basis):
            for _ in range(c):
                acc = tw.add(acc, b)
        from_coords[y] = acc
    assert len(set(from_coords.values())) == G.order == tw.order
    to_coords = {p: y for y, p in from_coords.items()}
    iota = hom_from_table(
        A, G, {a: to_coords[(a, B.zero)] for a in A.elements}
    )
    pi = hom_from_table(G, B, {y: from_coords[y][1] for y in G.elements})
    return Realization(tw, G, to_coords, from_coords, iota, pi)


def alg_extension_from_cocycle(
    A_top: TopAbGroup, B_top: TopAbGroup, h: FactorSet
) -> AlgExtension:
    real = realize_cocycle(A_top.group, B_top.group, h)
    return AlgExtension(A_top, real.G, B_top, real.iota, real.pi)


def is_topologizing(A_top: TopAbGroup, B_top: TopAbGroup, h: FactorSet) -> bool:
    """Continuity of h at (0, 0): h maps N_B x N_B into N_A."""
    bad = cocycle_violations(h)
    if bad:
        raise InvalidCocycle(bad[0])
    core_a = A_top.core_set
    return all(
        h(b, bp) in core_a for b in B_top.open_core for bp in B_top.open_core
    )


@cache
def nagao_core(alg: AlgExtension, s: Section) -> Subgroup:
    G = alg.G
    elems = {
        G.add(alg.iota(a), s(b))
        for a in alg.A.open_core
        for b in alg.B.open_core
    }
    return subgroup(G, elems)


def nagao_topology(alg: AlgExtension, s: Section) -> Extension:
    """Topologize G with open core theta_s(N_A x N_B)."""
    h = factor_set_from_section(alg, s)
    if not is_topologizing(alg.A, alg.B, h):
        witness = next(
            (b, bp)
            for b in alg.B.open_core
            for bp in alg.B.open_core
            if h(b, bp) not in alg.A.core_set
        )
        raise NotTopologizing(
            f"h_s({witness[0]}, {witness[1]}) = {h(*witness)} falls outside N_A"
        )
    G_top = TopAbGroup(alg.G, nagao_core(alg, s))
    return Extension(
        alg.A,
        G_top,
        alg.B,
        TopHom(alg.iota, alg.A, G_top),
        TopHom(alg.pi, G_top, alg.B),
    )


def topologizing_section(E: Extension) -> Section:
    """A section realizing E's topology: s(N_B) inside N_G, least preimages."""
    alg = E.alg
    mapping = {alg.B.group.zero: alg.G.zero}
    core_g = sorted(E.G.core_set)
    for g in core_g:
        mapping.setdefault(alg.pi(g), g)
    for g in alg.G.elements:
        mapping.setdefault(alg.pi(g), g)
    s = Section(alg.B.group, alg.G, tuple(mapping.items()))
    assert nagao_core(alg, s).element_set == E.G.core_set
    return s


def comparison_map(alg: AlgExtension, s1: Section, s2: Section) -> dict[Element, Element]:
    """b -> iota^{-1}(s1(b) - s2(b)), the section-comparison map into A."""
    G = alg.G
    return {
        b: alg.pull_back(G.sub(s1(b), s2(b))) for b in alg.B.group.elements
    }


def same_topology(alg: AlgExtension, s1: Section, s2: Section) -> bool:
    """Do two topologizing sections induce the same topology on G?

    Computed two ways (core equality, and continuity at 0 of the comparison
    map); the two criteria provably agree here and that agreement is asserted.
    """
    for s in (s1, s2):
        if not is_topologizing(alg.A, alg.B, factor_set_from_section(alg, s)):
            raise NotTopologizing("both sections must be topologizing")
    by_cores = nagao_core(alg, s1).element_set == nagao_core(alg, s2).element_set
    f = comparison_map(alg, s1, s2)
    core_a = alg.A.core_set
    by_comparison = all(f[b] in core_a for b in alg.B.open_core)
    assert by_cores == by_comparison, "comparison criteria disagree"
    return by_cores


@dataclass(frozen=True)
class ExtensionSquare:
    """Two extensions joined by vertical maps alpha, gamma, beta (gamma is bare)."""

    row1: Extension
    row2: Extension
    alpha: Homomorphism
    gamma: Homomorphism
    beta: Homomorphism

    def __post_init__(self):
        a1, a2 = self.row1.alg, self.row2.alg
        if (
            self.alpha.source != a1.A.group
            or self.alpha.target != a2.A.group
            or self.gamma.source != a1.G
            or self.gamma.target != a2.G
            or self.beta.source != a1.B.group
            or self.beta.target != a2.B.group
        ):
            raise DiagramError("vertical maps do not match the rows")
        for a in a1.A.group.elements:
            if self.gamma(a1.iota(a)) != a2.iota(self.alpha(a)):
                raise DiagramError(f"left square does not commute at {a}")
        for g in a1.G.elements:
            if a2.pi(self.gamma(g)) != self.beta(a1.pi(g)):
                raise DiagramError(f"right square does not commute at {g}")


def sigma(square: ExtensionSquare, s1: Section, s2: Section) -> dict[Element, Element]:
    """b -> iota2^{-1}(gamma(s1(b)) - s2(beta(b))), total on B1."""
    a1, a2 = square.row1.alg, square.row2.alg
    if s1.B != a1.B.group or s1.G != a1.G:
        raise InvalidSection("s1 does not belong to row 1")
    if s2.B != a2.B.group or s2.G != a2.G:
        raise InvalidSection("s2 does not belong to row 2")
    G2 = a2.G
    out = {}
    for b in a1.B.group.elements:
        out[b] = a2.pull_back(G2.sub(square.gamma(s1(b)), s2(square.beta(b))))
    assert out[a1.B.group.zero] == a2.A.group.zero
    return out


def is_compatible(square: ExtensionSquare, s1: Section, s2: Section) -> bool:
    """Continuity of sigma at 0: sigma(N_B1) inside N_A2."""
    sg = sigma(square, s1, s2)
    core_a2 = square.row2.A.core_set
    return all(sg[b] in core_a2 for b in square.row1.B.open_core)


def has_open_fibers(sigma_map: dict[Element, Element], B1_top: TopAbGroup) -> bool:
    """Every fiber of sigma is open, i.e. a union of cosets of N_B1."""
    core = B1_top.open_core
    G = B1_top.group
    for b in G.elements:
        v = sigma_map[b]
        if any(sigma_map[G.add(b, n)] != v for n in core):
            return False
    return True


def psi_maps(square: ExtensionSquare, s1: Section, s2: Section):
    """The coordinate transports psi, psi1, psi2 with psi = psi1 + psi2.

    psi is gamma read through the two theta charts; psi1(a,b) = (alpha(a), 0);
    psi2(a,b) = (sigma(b), beta(b)).  The pointwise decomposition identity is
    asserted (it follows from commutativity alone).
    """
    th1 = theta(square.row1, s1, check=False)
    th2 = theta(square.row2, s2, check=False)
    sg = sigma(square, s1, s2)
    tw2 = th2.twisted
    psi, psi1, psi2 = {}, {}, {}
    for p in th1.twisted.elements:
        a, b = p
        psi[p] = th2.inverse[square.gamma(th1(p))]
        psi1[p] = (square.alpha(a), tw2.B.zero)
        psi2[p] = (sg[b], square.beta(b))
        assert psi[p] == tw2.add(psi1[p], psi2[p]), "psi decomposition fails"
    return psi, psi1, psi2


def compatible_section_via_eta(
    square: ExtensionSquare, s1: Section, eta: Section | None = None
) -> Section:
    """The candidate section s2 = gamma o s1 o eta for surjective beta.

    eta is a set-theoretic section of beta with eta(0) = 0 (least preimages
    when omitted).  The result is always a section of pi2; whether it is
    compatible with s1 must be checked by the caller.
    """
    a1, a2 = square.row1.alg, square.row2.alg
    beta = square.beta
    if not beta.is_surjective():
        raise InvalidSection("the construction needs beta surjective")
    if eta is None:
        mapping = {a2.B.group.zero: a1.B.group.zero}
        for b1 in a1.B.group.elements:
            mapping.setdefault(beta(b1), b1)
        eta = Section(a2.B.group, a1.B.group, tuple(mapping.items()))
    else:
        if eta.B != a2.B.group or eta.G != a1.B.group:
            raise InvalidSection("eta must be a section table B2 -> B1")
        for b2 in a2.B.group.elements:
            if beta(eta(b2)) != b2:
                raise InvalidSection("eta is not a section of beta")
    mapping2 = {b2: square.gamma(s1(eta(b2))) for b2 in a2.B.group.elements}
    return section_for(a2, mapping2)


def split_extension(A_top: TopAbGroup, B_top: TopAbGroup) -> Extension:
    """The direct product with the product topology, as an extension."""
    alg = alg_extension_from_cocycle(
        A_top, B_top, zero_factor_set(A_top.group, B_top.group)
    )
    return nagao_topology(alg, canonical_section(alg))


@dataclass(frozen=True)
class SnakeSequence:
    """0 -> ker f -> N_G -> N_B -> coker f -> 0 for the separation comparison.

    f: A -> ker(pi_Haus) is the map induced by q_G o iota; the connecting map
    is the usual lift-push-project recipe.
    """

    ker_f: FinAbGroup
    core_g: FinAbGroup
    core_b: FinAbGroup
    coker_f: FinAbGroup
    maps: tuple[Homomorphism, Homomorphism, Homomorphism]
    exactness: tuple[tuple[str, bool], ...]

    @property
    def is_exact(self) -> bool:
        return all(ok for _, ok in self.exactness)


def snake_haus_sequence(E: Extension) -> SnakeSequence:
    alg = E.alg
    G, B = alg.G, alg.B.group
    haus_g, q_g = separation(E.G)
    haus_b, q_b = separation(E.B)
    pi_haus = hom_from_table(
        haus_g.group,
        haus_b.group,
        {
            q_g(g): q_b(alg.pi(g))
            for g in G.elements
        },
    )
    ker_pi_haus = pi_haus.kernel()
    kemb = subgroup_as_group(ker_pi_haus)
    # f: A -> ker(pi_Haus)
    f = hom_from_table(
        alg.A.group,
        kemb.group,
        {a: kemb.coord_of(q_g(alg.iota(a))) for a in alg.A.group.elements},
    )
    ker_f_emb = subgroup_as_group(f.kernel())
    ng_emb = subgroup_as_group(E.G.open_core)
    nb_emb = subgroup_as_group(E.B.open_core)
    coker, coker_proj = quotient(kemb.group, f.image())

    # ker f -> N_G, restriction of iota
    m1 = hom_from_table(
        ker_f_emb.group,
        ng_emb.group,
        {
            x: ng_emb.coord_of(alg.iota(ker_f_emb.include(x)))
            for x in ker_f_emb.group.elements
        },
    )
    # N_G -> N_B, restriction of pi
    m2 = hom_from_table(
        ng_emb.group,
        nb_emb.group,
        {
            x: nb_emb.coord_of(alg.pi(ng_emb.include(x)))
            for x in ng_emb.group.elements
        },
    )
    # connecting map N_B -> coker f: lift along pi, push through q_G, project
    lift = {}
    for g in G.elements:
        lift.setdefault(alg.pi(g), g)
    m3 = hom_from_table(
        nb_emb.group,
        coker,
        {
            x: coker_proj(kemb.coord_of(q_g(lift[nb_emb.include(x)])))
            for x in nb_emb.group.elements
        },
    )
    exactness = (
        ("ker_f_injects", m1.is_injective()),
        ("exact_at_core_g", is_exact_at(m1, m2)),
        ("exact_at_core_b", is_exact_at(m2, m3)),
        ("coker_surjects", m3.is_surjective()),
    )
    return SnakeSequence(
        ker_f_emb.group, ng_emb.group, nb_emb.group, coker, (m1, m2, m3), exactness
    )
