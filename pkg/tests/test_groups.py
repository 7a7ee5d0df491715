import pytest

from topab.errors import (
    CompositionMismatch,
    ElementNotInGroup,
    IllDefined,
    NonPositiveModulus,
    NotASubgroup,
)
from topab.groups import (
    all_homs,
    all_subgroups,
    canonical_form,
    compose,
    direct_product,
    group_structure,
    hom_from_table,
    identity_hom,
    image,
    invariant_factors,
    is_exact_at,
    isomorphism_class_moduli,
    kernel,
    make_group,
    make_hom,
    quotient,
    subgroup,
    subgroup_as_group,
    subgroup_generated,
    trivial_subgroup,
    zero_hom,
)


def test_make_group_basics():
    t = make_group([])
    assert t.order == 1 and t.exponent == 1 and t.elements == ((),)
    klein = make_group([2, 2])
    assert klein.order == 4 and klein.exponent == 2
    z4 = make_group([4])
    assert z4.order == 4 and z4.exponent == 4


def test_make_group_rejects_nonpositive():
    with pytest.raises(NonPositiveModulus):
        make_group([0])
    with pytest.raises(NonPositiveModulus):
        make_group([3, -1])


def test_element_arithmetic():
    g = make_group([4, 6])
    assert g.add((3, 5), (2, 2)) == (1, 1)
    assert g.neg((1, 0)) == (3, 0)
    assert g.scale(5, (1, 1)) == (1, 5)
    assert g.element_order((2, 3)) == 2
    assert g.element_order(g.zero) == 1
    with pytest.raises(ElementNotInGroup):
        g.check_element((4, 0))


def test_subgroup_generated():
    z4 = make_group([4])
    assert subgroup_generated(z4, {(2,)}).elements == ((0,), (2,))
    assert subgroup_generated(z4, set()).elements == ((0,),)
    klein = make_group([2, 2])
    assert subgroup_generated(klein, {(1, 0), (0, 1)}).order == 4
    with pytest.raises(ElementNotInGroup):
        subgroup_generated(z4, {(9,)})


def test_subgroup_rejects_non_closed():
    z4 = make_group([4])
    with pytest.raises(NotASubgroup):
        subgroup(z4, [(0,), (1,)])
    with pytest.raises(NotASubgroup):
        subgroup(z4, [(2,)])


def test_subgroup_generated_idempotent():
    g = make_group([2, 4])
    for s in all_subgroups(g):
        again = subgroup_generated(g, s.elements)
        assert again.elements == s.elements


def test_make_hom_ill_defined():
    z2, z4 = make_group([2]), make_group([4])
    with pytest.raises(IllDefined):
        make_hom(z2, z4, [(1,)])
    f = make_hom(z2, z4, [(2,)])
    assert f.image().elements == ((0,), (2,))
    g = make_hom(z4, z2, [(1,)])
    assert g.is_surjective() and g.kernel().elements == ((0,), (2,))


def test_hom_additivity_exhaustive_small():
    for mods_a, mods_b in [((4,), (2, 2)), ((2, 4), (4,)), ((3,), (6,))]:
        a, b = make_group(mods_a), make_group(mods_b)
        for f in all_homs(a, b):
            for x in a.elements:
                for y in a.elements:
                    assert f(a.add(x, y)) == b.add(f(x), f(y))


def test_hom_from_table_rejects_non_additive():
    z4 = make_group([4])
    table = {(0,): (0,), (1,): (1,), (2,): (2,), (3,): (0,)}
    with pytest.raises(IllDefined):
        hom_from_table(z4, z4, table)


def test_quotient_z4_by_two():
    z4 = make_group([4])
    q, proj = quotient(z4, subgroup(z4, [(0,), (2,)]))
    assert q.moduli == (2,)
    assert proj((1,)) == (1,)
    assert proj((2,)) == (0,)


def test_quotient_by_trivial_is_isomorphic():
    for mods in [(4,), (2, 2), (2, 4), (3, 9)]:
        g = make_group(mods)
        q, proj = quotient(g, trivial_subgroup(g))
        assert q.order == g.order
        assert proj.is_bijective()
        assert q.moduli == invariant_factors(mods)


def test_quotient_order_and_kernel():
    g = make_group([2, 4])
    for k in all_subgroups(g):
        q, proj = quotient(g, k)
        assert q.order * k.order == g.order
        assert proj.kernel().elements == k.elements


def test_quotient_tower_factors():
    g = make_group([2, 4])
    subs = all_subgroups(g)
    for k in subs:
        for l in subs:
            if not k.element_set <= l.element_set:
                continue
            qk, pk = quotient(g, k)
            ql, pl = quotient(g, l)
            # G -> G/L factors through G -> G/K
            table = {}
            ok = True
            for x in g.elements:
                key = pk(x)
                if key in table and table[key] != pl(x):
                    ok = False
                    break
                table[key] = pl(x)
            assert ok
            factor = hom_from_table(qk, ql, table)
            for x in g.elements:
                assert factor(pk(x)) == pl(x)


def test_is_exact_at():
    z2, z4 = make_group([2]), make_group([4])
    f = make_hom(z2, z4, [(2,)])
    g = make_hom(z4, z2, [(1,)])
    assert is_exact_at(f, g)
    assert is_exact_at(zero_hom(z2, z4), make_hom(z4, z4, [(1,)]))
    i = identity_hom(z2)
    assert not is_exact_at(i, i)
    with pytest.raises(CompositionMismatch):
        is_exact_at(g, g)


def test_kernel_image_module_functions():
    z4, z2 = make_group([4]), make_group([2])
    f = make_hom(z4, z2, [(1,)])
    assert kernel(f).elements == ((0,), (2,))
    assert image(f).elements == ((0,), (1,))


def test_compose():
    z8 = make_group([8])
    z4 = make_group([4])
    z2 = make_group([2])
    f = make_hom(z8, z4, [(1,)])
    g = make_hom(z4, z2, [(1,)])
    h = compose(g, f)
    assert h((3,)) == (1,)
    with pytest.raises(CompositionMismatch):
        compose(f, g)


def test_group_structure_on_quotient_like_sets():
    g = make_group([2, 4])
    factors, basis = group_structure(list(g.elements), g.add, g.zero)
    assert factors == (2, 4)
    assert sorted(g.element_order(b) for b in basis) == [2, 4]


def test_group_structure_klein_and_cyclic():
    z6 = make_group([6])
    factors, _ = group_structure(list(z6.elements), z6.add, z6.zero)
    assert factors == (6,)
    k = make_group([2, 2])
    factors, basis = group_structure(list(k.elements), k.add, k.zero)
    assert factors == (2, 2)
    assert len(set(basis)) == 2


def test_subgroup_as_group_roundtrip():
    g = make_group([4, 2])
    for s in all_subgroups(g):
        emb = subgroup_as_group(s)
        assert emb.group.order == s.order
        imgs = {emb.include(x) for x in emb.group.elements}
        assert imgs == s.element_set
        for x in emb.group.elements:
            for y in emb.group.elements:
                assert emb.include(emb.group.add(x, y)) == g.add(
                    emb.include(x), emb.include(y)
                )


def test_direct_product():
    a, b = make_group([2]), make_group([3])
    p, ia, ib, pa, pb = direct_product(a, b)
    assert p.moduli == (2, 3)
    assert ia((1,)) == (1, 0) and ib((2,)) == (0, 2)
    assert pa((1, 2)) == (1,) and pb((1, 2)) == (2,)


def test_all_subgroups_counts():
    assert len(all_subgroups(make_group([4]))) == 3
    assert len(all_subgroups(make_group([2, 2]))) == 5
    assert len(all_subgroups(make_group([]))) == 1
    assert len(all_subgroups(make_group([2, 2, 2]))) == 16
    assert len(all_subgroups(make_group([12]))) == 6


def test_invariant_factors():
    assert invariant_factors([2, 4]) == (2, 4)
    assert invariant_factors([4, 2]) == (2, 4)
    assert invariant_factors([2, 3]) == (6,)
    assert invariant_factors([2, 2, 3]) == (2, 6)
    assert invariant_factors([]) == ()
    assert canonical_form(make_group([6, 4])).moduli == (2, 12)


def test_isomorphism_classes_small():
    assert isomorphism_class_moduli(1) == ((),)
    assert isomorphism_class_moduli(4) == ((2, 2), (4,))
    assert isomorphism_class_moduli(8) == ((2, 2, 2), (2, 4), (8,))
    assert isomorphism_class_moduli(12) == ((2, 2, 3), (3, 4))


def test_all_homs_count():
    # |Hom(Z/m, Z/n)| = gcd(m, n), multiplicative over factors
    z4, z6 = make_group([4]), make_group([6])
    assert len(list(all_homs(z4, z6))) == 2
    k = make_group([2, 2])
    assert len(list(all_homs(k, k))) == 16
