import pytest

from topab.errors import NotContinuous
from topab.duality import (
    Character,
    all_characters,
    dual_extension,
    dual_group,
    dual_hom,
    duals_isomorphic,
    evaluation,
    pull_back,
    separation_dual_iso,
)
from topab.extensions import split_extension, alg_extension_from_cocycle, canonical_section, factor_set, nagao_topology
from topab.groups import all_subgroups, identity_hom, make_group, make_hom, zero_hom
from topab.search import all_groups_up_to_order
from topab.topology import (
    TopAbGroup,
    TopHom,
    discrete,
    indiscrete,
    is_continuous,
    separation,
    topologize,
)

Z2 = make_group([2])
Z4 = make_group([4])


def test_all_characters_count_and_additivity():
    for mods in [(), (2,), (4,), (2, 2), (2, 4), (6,)]:
        G = make_group(mods)
        chars = all_characters(G)
        assert len(chars) == G.order
        for chi in chars:
            for x in G.elements:
                for y in G.elements:
                    assert chi(G.add(x, y)) == (chi(x) + chi(y)) % G.exponent


def test_dual_group_sizes():
    d = dual_group(discrete(Z4))
    assert d.order == 4 and d.structure.moduli == (4,)
    d = dual_group(topologize(Z4, [(0,), (2,)]))
    assert d.order == 2 and d.structure.moduli == (2,)
    d = dual_group(indiscrete(Z4))
    assert d.order == 1 and d.structure.moduli == ()


def test_dual_is_discrete_and_sized_like_separation():
    for G in all_groups_up_to_order(8):
        for s in all_subgroups(G):
            t = TopAbGroup(G, s)
            d = dual_group(t)
            haus, _ = separation(t)
            assert d.order == haus.group.order
            assert d.as_top.open_core.order == 1
            # structure is isomorphic to the separation
            assert d.structure.moduli == haus.group.moduli


def test_elem_char_tables_are_isomorphisms():
    t = topologize(make_group([2, 4]), [(0, 0), (0, 2)])
    d = dual_group(t)
    st = d.structure
    e = t.group.exponent
    for x in st.elements:
        for y in st.elements:
            lhs = d.elem_to_char[st.add(x, y)]
            rhs_vals = tuple(
                (a + b) % e
                for a, b in zip(d.elem_to_char[x].gen_values, d.elem_to_char[y].gen_values)
            )
            assert lhs.gen_values == rhs_vals


def test_dual_hom_contravariant():
    f = TopHom(make_hom(Z4, Z2, [(1,)]), discrete(Z4), discrete(Z2))
    g = TopHom(make_hom(Z2, Z4, [(2,)]), discrete(Z2), discrete(Z4))
    df, dg = dual_hom(f), dual_hom(g)
    # dual of a surjection is injective; dual of an injection is surjective
    assert df.is_injective()
    assert dg.is_surjective()
    # contravariance: (g o f)* = f* o g* -- compose f after g: f o g = 0 here
    from topab.groups import compose
    from topab.topology import compose_top

    fg = compose_top(f, g)
    assert dual_hom(fg).table == compose(dg, df).table


def test_dual_hom_rejects_discontinuous():
    f = TopHom(identity_hom(Z2), indiscrete(Z2), discrete(Z2))
    assert not is_continuous(f)
    with pytest.raises(NotContinuous):
        dual_hom(f)


def test_dual_of_identity_and_zero():
    t = discrete(Z4)
    did = dual_hom(TopHom(identity_hom(Z4), t, t))
    assert did.table == identity_hom(dual_group(t).structure).table
    z = dual_hom(TopHom(zero_hom(Z4, Z2), t, discrete(Z2)))
    assert z.is_zero()


def test_evaluation_kernel_is_core():
    for G in [Z2, Z4, make_group([2, 2]), make_group([2, 4])]:
        for s in all_subgroups(G):
            t = TopAbGroup(G, s)
            ev = evaluation(t)
            assert ev.map.kernel().elements == t.open_core.elements
            # induced map on the separation is an isomorphism
            haus, q = separation(t)
            assert ev.map.image().order == haus.group.order


def test_evaluation_discrete_is_iso():
    ev = evaluation(discrete(Z4))
    assert ev.map.is_bijective()
    ev = evaluation(indiscrete(Z4))
    assert ev.target.group.order == 1


def test_pullback_rescaling():
    f = make_hom(Z2, Z4, [(2,)])
    chi = Character(Z4, (1,))
    back = pull_back(chi, f)
    assert back.group == Z2 and back((1,)) == 1  # 2/4 becomes 1/2


def test_dual_extension_discrete_z4():
    alg = alg_extension_from_cocycle(
        discrete(Z2), discrete(Z2), factor_set(Z2, Z2, {((1,), (1,)): (1,)})
    )
    e = nagao_topology(alg, canonical_section(alg))
    assert e.G.group.moduli == (4,)
    seq = dual_extension(e)
    assert seq.is_extension
    assert seq.b_dual.order == 2 and seq.g_dual.order == 4 and seq.a_dual.order == 2


def test_dual_extension_degenerate():
    e = split_extension(indiscrete(Z2), discrete(Z2))
    seq = dual_extension(e)
    assert seq.a_dual.order == 1
    assert seq.is_extension


def test_duals_isomorphic():
    assert duals_isomorphic(discrete(Z4), discrete(Z4))
    assert not duals_isomorphic(discrete(Z4), discrete(make_group([2, 2])))
    assert not duals_isomorphic(discrete(make_group([])), discrete(Z2))
    # a group and its separation have isomorphic duals
    t = topologize(Z4, [(0,), (2,)])
    haus, _ = separation(t)
    assert duals_isomorphic(t, haus)


def test_separation_dual_iso():
    for G in [Z4, make_group([2, 2]), make_group([2, 4])]:
        for s in all_subgroups(G):
            t = TopAbGroup(G, s)
            f = separation_dual_iso(t)
            assert f.is_bijective()
