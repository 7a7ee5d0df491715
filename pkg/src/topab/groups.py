"""Finite abelian groups, subgroups, homomorphisms, quotients.

Groups are direct sums of cyclic groups Z/m1 x ... x Z/mk in additive
notation.  Elements are coordinate tuples reduced into [0, mi).  Everything
is immutable after construction; homomorphisms are defined on the standard
generators and totalized eagerly so applying them inside enumeration loops
is a dict lookup.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import gcd, lcm, prod
from typing import Callable, Iterable, Iterator, Sequence

from .errors import (
    CompositionMismatch,
    ElementNotInGroup,
    IllDefined,
    NonPositiveModulus,
    NotASubgroup,
)

Element = tuple[int, ...]


@dataclass(frozen=True)
class FinAbGroup:
    """Z/m1 + ... + Z/mk; the empty tuple of moduli is the trivial group."""

    moduli: tuple[int, ...]

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash(self.moduli)
            self.__dict__["_hash"] = h
            return h

    def __post_init__(self):
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if any(m < 1 for m in self.moduli):
            raise NonPositiveModulus(f"moduli must be >= 1, got {self.moduli}")

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @cached_property
    def order(self) -> int:
        return prod(self.moduli)

    @cached_property
    def exponent(self) -> int:
        return lcm(*self.moduli) if self.moduli else 1

    @cached_property
    def zero(self) -> Element:
        return (0,) * len(self.moduli)

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        return tuple(itertools.product(*(range(m) for m in self.moduli)))

    @cached_property
    def index(self) -> dict[Element, int]:
        return {x: i for i, x in enumerate(self.elements)}

    def check_element(self, x: Element) -> Element:
        if x not in self.index:
            raise ElementNotInGroup(f"{x!r} is not an element of {self}")
        return x

    def reduce(self, coords: Sequence[int]) -> Element:
        if len(coords) != len(self.moduli):
            raise ElementNotInGroup(
                f"coordinate tuple {tuple(coords)!r} has wrong length for {self}"
            )
        return tuple(int(c) % m for c, m in zip(coords, self.moduli))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    def neg(self, x: Element) -> Element:
        return tuple((-a) % m for a, m in zip(x, self.moduli))

    def sub(self, x: Element, y: Element) -> Element:
        return tuple((a - b) % m for a, b, m in zip(x, y, self.moduli))

    def scale(self, k: int, x: Element) -> Element:
        return tuple((k * a) % m for a, m in zip(x, self.moduli))

    def generators(self) -> tuple[Element, ...]:
        n = len(self.moduli)
        return tuple(
            tuple(1 if j == i else 0 for j in range(n)) for i in range(n)
        )

    def element_order(self, x: Element) -> int:
        return lcm(*(m // gcd(m, a) for a, m in zip(x, self.moduli))) if x else 1

    def __str__(self) -> str:
        if not self.moduli:
            return "0"
        return " x ".join(f"Z/{m}" for m in self.moduli)


def make_group(moduli: Iterable[int]) -> FinAbGroup:
    """Build the direct sum of cyclic groups of the given orders."""
    return FinAbGroup(tuple(moduli))


@dataclass(frozen=True)
class Subgroup:
    """A subgroup stored as a canonically sorted element set."""

    parent: FinAbGroup
    elements: tuple[Element, ...]

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.parent.moduli, self.elements))
            self.__dict__["_hash"] = h
            return h

    def __post_init__(self):
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        for x in elems:
            self.parent.check_element(x)
        eset = frozenset(elems)
        if self.parent.zero not in eset:
            raise NotASubgroup("subgroup must contain zero")
        for x in elems:
            if self.parent.neg(x) not in eset:
                raise NotASubgroup(f"not closed under negation at {x}")
            for y in elems:
                if self.parent.add(x, y) not in eset:
                    raise NotASubgroup(f"not closed under addition at {x} + {y}")

    @cached_property
    def element_set(self) -> frozenset[Element]:
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x: Element) -> bool:
        return x in self.element_set

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)


def subgroup(parent: FinAbGroup, elems: Iterable[Element]) -> Subgroup:
    return Subgroup(parent, tuple(elems))


def trivial_subgroup(G: FinAbGroup) -> Subgroup:
    return Subgroup(G, (G.zero,))


def full_subgroup(G: FinAbGroup) -> Subgroup:
    return Subgroup(G, G.elements)


def subgroup_generated(G: FinAbGroup, gens: Iterable[Element]) -> Subgroup:
    """Smallest subgroup of G containing the given elements."""
    for g in gens:
        G.check_element(g)
    span = {G.zero}
    for g in sorted(set(gens)):
        multiples = []
        y = G.zero
        for _ in range(G.element_order(g)):
            multiples.append(y)
            y = G.add(y, g)
        span = {G.add(s, m) for s in span for m in multiples}
    return Subgroup(G, tuple(span))


@dataclass(frozen=True)
class Homomorphism:
    """A homomorphism given by images of the standard generators."""

    source: FinAbGroup
    target: FinAbGroup
    gen_images: tuple[Element, ...]

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.source.moduli, self.target.moduli, self.gen_images))
            self.__dict__["_hash"] = h
            return h

    def __post_init__(self):
        if len(self.gen_images) != self.source.rank:
            raise IllDefined(
                f"expected {self.source.rank} generator images, got {len(self.gen_images)}"
            )
        imgs = tuple(self.target.check_element(g) for g in self.gen_images)
        object.__setattr__(self, "gen_images", imgs)
        for m, img in zip(self.source.moduli, imgs):
            if self.target.scale(m, img) != self.target.zero:
                raise IllDefined(
                    f"{m} * {img} != 0 in {self.target}; assignment is not well defined"
                )

    @cached_property
    def table(self) -> dict[Element, Element]:
        out = {}
        tgt = self.target
        for x in self.source.elements:
            acc = tgt.zero
            for c, img in zip(x, self.gen_images):
                if c:
                    acc = tgt.add(acc, tgt.scale(c, img))
            out[x] = acc
        return out

    def __call__(self, x: Element) -> Element:
        try:
            return self.table[x]
        except KeyError:
            raise ElementNotInGroup(f"{x!r} is not in {self.source}") from None

    @cached_property
    def _kernel(self) -> Subgroup:
        return Subgroup(
            self.source,
            tuple(x for x, y in self.table.items() if y == self.target.zero),
        )

    @cached_property
    def _image(self) -> Subgroup:
        return Subgroup(self.target, tuple(set(self.table.values())))

    def kernel(self) -> Subgroup:
        return self._kernel

    def image(self) -> Subgroup:
        return self._image

    def is_injective(self) -> bool:
        return len(set(self.table.values())) == self.source.order

    def is_surjective(self) -> bool:
        return len(set(self.table.values())) == self.target.order

    def is_bijective(self) -> bool:
        return self.source.order == self.target.order and self.is_injective()

    def is_zero(self) -> bool:
        return all(y == self.target.zero for y in self.table.values())


def make_hom(
    source: FinAbGroup, target: FinAbGroup, gen_images: Iterable[Sequence[int]]
) -> Homomorphism:
    return Homomorphism(source, target, tuple(target.reduce(g) for g in gen_images))


def hom_from_table(
    source: FinAbGroup, target: FinAbGroup, table: dict[Element, Element]
) -> Homomorphism:
    """Build a homomorphism from a total element map, verifying additivity."""
    gen_images = tuple(table[g] for g in source.generators())
    f = Homomorphism(source, target, gen_images)
    for x in source.elements:
        if f.table[x] != table[x]:
            raise IllDefined(f"table is not additive at {x}")
    return f


def identity_hom(G: FinAbGroup) -> Homomorphism:
    return Homomorphism(G, G, G.generators())


def zero_hom(source: FinAbGroup, target: FinAbGroup) -> Homomorphism:
    return Homomorphism(source, target, tuple(target.zero for _ in source.moduli))


def compose(outer: Homomorphism, inner: Homomorphism) -> Homomorphism:
    if inner.target != outer.source:
        raise CompositionMismatch(
            f"cannot compose {outer.source} <- {inner.target} mismatch"
        )
    return Homomorphism(
        inner.source, outer.target, tuple(outer(inner(g)) for g in inner.source.generators())
    )


def hom_inverse(f: Homomorphism) -> Homomorphism:
    if not f.is_bijective():
        raise IllDefined("only bijective homomorphisms can be inverted")
    inv = {y: x for x, y in f.table.items()}
    return hom_from_table(f.target, f.source, inv)


def all_homs(source: FinAbGroup, target: FinAbGroup) -> Iterator[Homomorphism]:
    """All homomorphisms source -> target, in deterministic order."""
    choices = []
    for m in source.moduli:
        # images of a generator of order m are the elements killed by m
        choices.append(
            [y for y in target.elements if target.scale(m, y) == target.zero]
        )
    for imgs in itertools.product(*choices):
        yield Homomorphism(source, target, imgs)


def kernel(f: Homomorphism) -> Subgroup:
    return f.kernel()


def image(f: Homomorphism) -> Subgroup:
    return f.image()


def is_exact_at(f: Homomorphism, g: Homomorphism) -> bool:
    """Exactness at the middle of source(f) -> target(f) = source(g) -> target(g)."""
    if f.target != g.source:
        raise CompositionMismatch("target of f must equal source of g")
    return f.image().element_set == g.kernel().element_set


def _prime_factors(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factors(moduli: Iterable[int]) -> tuple[int, ...]:
    """Invariant factors d1 | d2 | ... | dr (ascending) of a cyclic decomposition."""
    per_prime: dict[int, list[int]] = {}
    for m in moduli:
        for p, e in _prime_factors(m).items():
            per_prime.setdefault(p, []).append(e)
    for p in per_prime:
        per_prime[p].sort(reverse=True)
    r = max((len(v) for v in per_prime.values()), default=0)
    desc = []
    for t in range(r):
        d = 1
        for p, exps in per_prime.items():
            if t < len(exps):
                d *= p ** exps[t]
        desc.append(d)
    return tuple(reversed(desc))


def canonical_form(G: FinAbGroup) -> FinAbGroup:
    return FinAbGroup(invariant_factors(G.moduli))


def group_structure(
    elems: Sequence, add: Callable, zero
) -> tuple[tuple[int, ...], tuple]:
    """Invariant factors (ascending) and a matching direct-sum basis.

    Works on any concrete finite abelian group: a sortable element list, a
    binary operation and a zero.  The factors come from order statistics
    (counting solutions of p^j * x = 0 reads off the conjugate partition of
    the p-primary type); the basis from a backtracking search constrained to
    those factors.
    """
    elems = sorted(elems)
    n = len(elems)
    if n == 1:
        return (), ()
    order = {}
    for x in elems:
        k, y = 1, x
        while y != zero:
            y = add(y, x)
            k += 1
        order[x] = k
    parts: dict[int, list[int]] = {}
    for p in _prime_factors(n):
        counts = [1]
        j = 1
        while True:
            pj = p**j
            c = sum(1 for x in elems if pj % order[x] == 0)
            counts.append(c)
            if c == counts[-2]:
                break
            j += 1
        conj = []
        for i in range(1, len(counts)):
            ratio, t = counts[i] // counts[i - 1], 0
            assert counts[i] % counts[i - 1] == 0
            while ratio > 1:
                assert ratio % p == 0
                ratio //= p
                t += 1
            conj.append(t)
        lam = [sum(1 for v in conj if v >= i) for i in range(1, conj[0] + 1)]
        parts[p] = lam
    r = max(len(v) for v in parts.values())
    desc = []
    for t in range(r):
        d = 1
        for p, lam in parts.items():
            if t < len(lam):
                d *= p ** lam[t]
        desc.append(d)
    assert prod(desc) == n

    by_order: dict[int, list] = {}
    for x in elems:
        by_order.setdefault(order[x], []).append(x)

    def extend(idx: int, span: frozenset, chosen: tuple):
        if idx == r:
            return chosen
        d = desc[idx]
        for x in by_order.get(d, []):
            y, ok = x, True
            for _ in range(d - 1):
                if y in span:
                    ok = False
                    break
                y = add(y, x)
            if not ok:
                continue
            mults, y = [zero], x
            for _ in range(d - 1):
                mults.append(y)
                y = add(y, x)
            bigger = frozenset(add(s, m) for s in span for m in mults)
            res = extend(idx + 1, bigger, chosen + (x,))
            if res is not None:
                return res
        return None

    basis = extend(0, frozenset([zero]), ())
    assert basis is not None, "no basis found; input is not a group?"
    return tuple(reversed(desc)), tuple(reversed(basis))


def quotient(G: FinAbGroup, K: Subgroup) -> tuple[FinAbGroup, Homomorphism]:
    """G/K in canonical cyclic decomposition plus the projection."""
    if K.parent != G:
        raise NotASubgroup("K is not a subgroup of G")
    rep: dict[Element, Element] = {}
    for x in G.elements:
        if x in rep:
            continue
        coset = sorted(G.add(x, k) for k in K.elements)
        for y in coset:
            rep[y] = coset[0]
    reps = sorted(set(rep.values()))
    zero_rep = rep[G.zero]

    def radd(a, b):
        return rep[G.add(a, b)]

    factors, basis = group_structure(reps, radd, zero_rep)
    Q = FinAbGroup(factors)
    to_rep = {}
    for y in Q.elements:
        acc = zero_rep
        for c, b in zip(y, basis):
            for _ in range(c):
                acc = radd(acc, b)
        to_rep[y] = acc
    assert len(set(to_rep.values())) == Q.order == len(reps)
    from_rep = {v: k for k, v in to_rep.items()}
    proj = Homomorphism(G, Q, tuple(from_rep[rep[g]] for g in G.generators()))
    assert all(proj(x) == from_rep[rep[x]] for x in G.elements)
    assert proj.kernel().elements == K.elements
    assert Q.order * K.order == G.order
    return Q, proj


@dataclass(frozen=True)
class GroupEmbedding:
    """A subgroup realized as a group in its own right, with the inclusion."""

    group: FinAbGroup
    include: Homomorphism
    coords: dict  # parent element of the subgroup -> element of .group

    def coord_of(self, x: Element) -> Element:
        return self.coords[x]


def subgroup_as_group(S: Subgroup) -> GroupEmbedding:
    G = S.parent
    factors, basis = group_structure(list(S.elements), G.add, G.zero)
    H = FinAbGroup(factors)
    to_parent = {}
    for y in H.elements:
        acc = G.zero
        for c, b in zip(y, basis):
            if c:
                acc = G.add(acc, G.scale(c, b))
        to_parent[y] = acc
    assert len(set(to_parent.values())) == H.order == S.order
    include = Homomorphism(H, G, tuple(basis))
    assert all(include(y) == to_parent[y] for y in H.elements)
    coords = {v: k for k, v in to_parent.items()}
    return GroupEmbedding(H, include, coords)


def direct_product(
    G: FinAbGroup, H: FinAbGroup
) -> tuple[FinAbGroup, Homomorphism, Homomorphism, Homomorphism, Homomorphism]:
    """G x H with the two inclusions and the two projections."""
    P = FinAbGroup(G.moduli + H.moduli)
    zg, zh = G.zero, H.zero
    inc_g = Homomorphism(G, P, tuple(g + zh for g in G.generators()))
    inc_h = Homomorphism(H, P, tuple(zg + h for h in H.generators()))
    proj_g = Homomorphism(P, G, tuple(G.generators()) + tuple(zg for _ in H.moduli))
    proj_h = Homomorphism(P, H, tuple(zh for _ in G.moduli) + tuple(H.generators()))
    return P, inc_g, inc_h, proj_g, proj_h


def all_subgroups(G: FinAbGroup) -> tuple[Subgroup, ...]:
    """Every subgroup of G exactly once, sorted by (order, element list)."""
    triv = trivial_subgroup(G)
    seen = {triv.elements: triv}
    frontier = [triv]
    while frontier:
        S = frontier.pop()
        for x in G.elements:
            if x in S.element_set:
                continue
            T = subgroup_generated(G, set(S.elements) | {x})
            if T.elements not in seen:
                seen[T.elements] = T
                frontier.append(T)
    return tuple(sorted(seen.values(), key=lambda s: (s.order, s.elements)))


def _partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Integer partitions of n, descending parts, deterministic order."""
    if n == 0:
        yield ()
        return
    def rec(remaining, maximum):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, maximum), 0, -1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest
    yield from rec(n, n)


def isomorphism_class_moduli(order: int) -> tuple[tuple[int, ...], ...]:
    """Moduli tuples (sorted prime powers) for each class of the given order."""
    if order == 1:
        return ((),)
    fact = _prime_factors(order)
    per_prime = []
    for p in sorted(fact):
        per_prime.append([tuple(p**e for e in lam) for lam in _partitions(fact[p])])
    out = []
    for combo in itertools.product(*per_prime):
        moduli = tuple(sorted(itertools.chain.from_iterable(combo)))
        out.append(moduli)
    return tuple(sorted(out))
