"""Pontryagin duals of finite topological abelian groups.

Characters take values in the torsion subgroup Q/Z of the circle, stored as
numerators over the group exponent, so all arithmetic is exact.  A character
of (G, N) is continuous iff it kills N, so the dual is the character group
of G/N, carried discretely: the dual of a finite Hausdorff group under the
compact-open topology is discrete, so that topology is declared rather than
constructed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cache, cached_property

from .errors import NotAnExtension, NotContinuous
from .extensions import Extension
from .groups import (
    Element,
    FinAbGroup,
    Homomorphism,
    group_structure,
    hom_from_table,
    invariant_factors,
    is_exact_at,
)
from .topology import TopAbGroup, TopHom, discrete, is_continuous, is_strict, separation


@dataclass(frozen=True)
class Character:
    """A homomorphism G -> Q/Z with values v/exponent, v stored mod exponent."""

    group: FinAbGroup
    gen_values: tuple[int, ...]

    def __post_init__(self):
        e = self.group.exponent
        vals = tuple(int(v) % e for v in self.gen_values)
        object.__setattr__(self, "gen_values", vals)
        if len(vals) != self.group.rank:
            raise ValueError("one value per generator required")
        for m, v in zip(self.group.moduli, vals):
            if (m * v) % e != 0:
                raise ValueError(f"value {v}/{e} has order not dividing {m}")

    @property
    def denominator(self) -> int:
        return self.group.exponent

    @cached_property
    def values(self) -> dict[Element, int]:
        e = self.group.exponent
        return {
            x: sum(c * v for c, v in zip(x, self.gen_values)) % e
            for x in self.group.elements
        }

    def __call__(self, x: Element) -> int:
        return self.values[x]

    def kills(self, elems) -> bool:
        return all(self.values[x] == 0 for x in elems)


def _char_add(x: Character, y: Character) -> Character:
    e = x.group.exponent
    return Character(x.group, tuple((a + b) % e for a, b in zip(x.gen_values, y.gen_values)))


def all_characters(G: FinAbGroup) -> tuple[Character, ...]:
    """Every character of the bare group, in deterministic order."""
    e = G.exponent
    choices = []
    for m in G.moduli:
        step = e // m
        choices.append([k * step for k in range(m)])
    return tuple(Character(G, vals) for vals in itertools.product(*choices))


@dataclass(frozen=True)
class DualGroup:
    """All continuous characters of a topologized group, carried discretely."""

    base: TopAbGroup
    characters: tuple[Character, ...]
    structure: FinAbGroup
    _elem_to_char: tuple[tuple[Element, Character], ...]

    @cached_property
    def elem_to_char(self) -> dict[Element, Character]:
        return dict(self._elem_to_char)

    @cached_property
    def char_to_elem(self) -> dict[Character, Element]:
        return {c: x for x, c in self._elem_to_char}

    @property
    def order(self) -> int:
        return len(self.characters)

    @cached_property
    def as_top(self) -> TopAbGroup:
        return discrete(self.structure)


@cache
def dual_group(T: TopAbGroup) -> DualGroup:
    """The group of characters killing the open core, in canonical form."""
    core = T.open_core.elements
    continuous = tuple(
        chi for chi in all_characters(T.group) if chi.kills(core)
    )
    zero_char = Character(T.group, (0,) * T.group.rank)
    key = {chi.gen_values: chi for chi in continuous}

    def add(u, v):
        e = T.group.exponent
        return tuple((a + b) % e for a, b in zip(u, v))

    factors, basis_keys = group_structure(
        [chi.gen_values for chi in continuous], add, zero_char.gen_values
    )
    structure = FinAbGroup(factors)
    pairs = []
    for y in structure.elements:
        acc = zero_char.gen_values
        for c, bk in zip(y, basis_keys):
            for _ in range(c):
                acc = add(acc, bk)
        pairs.append((y, key[acc]))
    assert len({c for _, c in pairs}) == len(continuous)
    return DualGroup(T, continuous, structure, tuple(pairs))


def _rescale(value: int, from_den: int, to_den: int) -> int:
    """Rewrite value/from_den as an integer over to_den."""
    num = value * to_den
    assert num % from_den == 0, "character value does not live over the target denominator"
    return (num // from_den) % to_den


def pull_back(chi: Character, f: Homomorphism) -> Character:
    """chi o f as a character of the source of f."""
    src = f.source
    e_src, e_tgt = src.exponent, chi.group.exponent
    vals = tuple(
        _rescale(chi(f(g)), e_tgt, e_src) for g in src.generators()
    )
    return Character(src, vals)


def dual_hom(f: TopHom) -> Homomorphism:
    """The dual map between dual structures, chi -> chi o f (contravariant)."""
    if not is_continuous(f):
        raise NotContinuous("only continuous maps dualize to continuous characters")
    d_tgt = dual_group(f.target)
    d_src = dual_group(f.source)
    table = {}
    for x in d_tgt.structure.elements:
        chi = d_tgt.elem_to_char[x]
        table[x] = d_src.char_to_elem[pull_back(chi, f.map)]
    return hom_from_table(d_tgt.structure, d_src.structure, table)


def evaluation(T: TopAbGroup) -> TopHom:
    """g -> (chi -> chi(g)), from T into its double dual."""
    d = dual_group(T)
    dd = dual_group(d.as_top)
    e_d = d.structure.exponent
    e_g = T.group.exponent
    table = {}
    for g in T.group.elements:
        vals = tuple(
            _rescale(d.elem_to_char[x](g), e_g, e_d)
            for x in d.structure.generators()
        )
        table[g] = dd.char_to_elem[Character(d.structure, vals)]
    return TopHom(hom_from_table(T.group, dd.structure, table), T, dd.as_top)


@dataclass(frozen=True)
class DualSequence:
    """0 -> B* -> G* -> A* -> 0 with its exactness and strictness report."""

    b_dual: DualGroup
    g_dual: DualGroup
    a_dual: DualGroup
    pi_dual: Homomorphism
    iota_dual: Homomorphism
    checks: tuple[tuple[str, bool], ...]
    hypothesis_flags: tuple[tuple[str, bool], ...]

    @property
    def is_extension(self) -> bool:
        return all(ok for _, ok in self.checks)


def dual_extension(E: Extension) -> DualSequence:
    if not isinstance(E, Extension):
        raise NotAnExtension("dual_extension expects a topological extension")
    b_dual = dual_group(E.B)
    g_dual = dual_group(E.G)
    a_dual = dual_group(E.A)
    pi_dual = dual_hom(E.pi)
    iota_dual = dual_hom(E.iota)
    pi_dual_top = TopHom(pi_dual, b_dual.as_top, g_dual.as_top)
    iota_dual_top = TopHom(iota_dual, g_dual.as_top, a_dual.as_top)
    checks = (
        ("pi_dual_injective", pi_dual.is_injective()),
        ("exact_at_g_dual", is_exact_at(pi_dual, iota_dual)),
        ("iota_dual_surjective", iota_dual.is_surjective()),
        ("pi_dual_continuous", is_continuous(pi_dual_top)),
        ("pi_dual_strict", is_continuous(pi_dual_top) and is_strict(pi_dual_top)),
        ("iota_dual_continuous", is_continuous(iota_dual_top)),
        ("iota_dual_strict", is_continuous(iota_dual_top) and is_strict(iota_dual_top)),
    )
    flags = (
        ("kernel_group_hausdorff", E.A.open_core.order == 1),
        ("quotient_group_hausdorff", E.B.open_core.order == 1),
    )
    return DualSequence(b_dual, g_dual, a_dual, pi_dual, iota_dual, checks, flags)


def duals_isomorphic(T1: TopAbGroup, T2: TopAbGroup) -> bool:
    """Discrete duals are isomorphic iff their invariant factors agree."""
    m1 = invariant_factors(dual_group(T1).structure.moduli)
    m2 = invariant_factors(dual_group(T2).structure.moduli)
    return m1 == m2


def separation_dual_iso(T: TopAbGroup) -> Homomorphism:
    """(G_Haus)* -> G*, the dual of the separation projection; an isomorphism."""
    haus, q = separation(T)
    return dual_hom(q)
