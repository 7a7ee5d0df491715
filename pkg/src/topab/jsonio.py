"""JSON codecs for every value that crosses the CLI boundary.

All encoders emit plain dict/list/int structures; `dumps` renders them with
sorted keys and compact separators so repeated runs are byte-identical.
"""

from __future__ import annotations

import json

from .errors import DiagramError
from .extensions import AlgExtension, Extension, FactorSet, Section
from .duality import Character, DualGroup
from .groups import Element, FinAbGroup, Homomorphism, Subgroup, subgroup
from .topology import TopAbGroup, TopHom
from . import diagrams


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def element_to_json(x: Element) -> list[int]:
    return list(x)


def element_from_json(G: FinAbGroup, data) -> Element:
    return G.check_element(tuple(int(c) for c in data))


def group_to_json(G: FinAbGroup) -> dict:
    return {"moduli": list(G.moduli)}


def group_from_json(data) -> FinAbGroup:
    return FinAbGroup(tuple(int(m) for m in data["moduli"]))


def subgroup_to_json(S: Subgroup) -> dict:
    return {"elements": [element_to_json(x) for x in S.elements]}


def subgroup_from_json(parent: FinAbGroup, data) -> Subgroup:
    return subgroup(parent, [element_from_json(parent, x) for x in data["elements"]])


def hom_to_json(f: Homomorphism) -> dict:
    return {
        "source": group_to_json(f.source),
        "target": group_to_json(f.target),
        "gen_images": [element_to_json(x) for x in f.gen_images],
    }


def hom_from_json(data) -> Homomorphism:
    source = group_from_json(data["source"])
    target = group_from_json(data["target"])
    return Homomorphism(
        source,
        target,
        tuple(element_from_json(target, x) for x in data["gen_images"]),
    )


def topgroup_to_json(T: TopAbGroup) -> dict:
    return {
        "group": group_to_json(T.group),
        "open_core": subgroup_to_json(T.open_core),
    }


def topgroup_from_json(data) -> TopAbGroup:
    G = group_from_json(data["group"])
    return TopAbGroup(G, subgroup_from_json(G, data["open_core"]))


def cocycle_to_json(h: FactorSet) -> dict:
    return {
        "A": group_to_json(h.A),
        "B": group_to_json(h.B),
        "table": [
            [element_to_json(b), element_to_json(bp), element_to_json(a)]
            for b, bp, a in h.entries
        ],
    }


def cocycle_from_json(data) -> FactorSet:
    A = group_from_json(data["A"])
    B = group_from_json(data["B"])
    entries = tuple(
        (
            element_from_json(B, b),
            element_from_json(B, bp),
            element_from_json(A, a),
        )
        for b, bp, a in data["table"]
    )
    return FactorSet(A, B, entries)


def section_to_json(s: Section) -> dict:
    return {
        "table": [
            [element_to_json(b), element_to_json(g)] for b, g in s.entries
        ]
    }


def section_from_json(B: FinAbGroup, G: FinAbGroup, data) -> Section:
    entries = tuple(
        (element_from_json(B, b), element_from_json(G, g))
        for b, g in data["table"]
    )
    return Section(B, G, entries)


def character_to_json(chi: Character) -> dict:
    return {
        "values": [
            [element_to_json(x), v] for x, v in sorted(chi.values.items())
        ],
        "denominator": chi.denominator,
    }


def character_from_json(G: FinAbGroup, data) -> Character:
    if int(data["denominator"]) != G.exponent:
        raise DiagramError("character denominator must be the group exponent")
    values = {
        element_from_json(G, x): int(v) % G.exponent for x, v in data["values"]
    }
    gen_values = tuple(values[g] for g in G.generators())
    chi = Character(G, gen_values)
    if chi.values != values:
        raise DiagramError("character table is not additive")
    return chi


def dual_to_json(d: DualGroup) -> dict:
    return {
        "structure": group_to_json(d.structure),
        "characters": [character_to_json(c) for c in d.characters],
    }


def alg_extension_to_json(alg: AlgExtension) -> dict:
    return {
        "A": topgroup_to_json(alg.A),
        "G": group_to_json(alg.G),
        "B": topgroup_to_json(alg.B),
        "iota": hom_to_json(alg.iota),
        "pi": hom_to_json(alg.pi),
    }


def alg_extension_from_json(data) -> AlgExtension:
    return AlgExtension(
        topgroup_from_json(data["A"]),
        group_from_json(data["G"]),
        topgroup_from_json(data["B"]),
        hom_from_json(data["iota"]),
        hom_from_json(data["pi"]),
    )


def extension_to_json(E: Extension) -> dict:
    out = alg_extension_to_json(E.alg)
    out["G"] = topgroup_to_json(E.G)
    return out


def extension_from_json(data) -> Extension:
    A = topgroup_from_json(data["A"])
    G = topgroup_from_json(data["G"])
    B = topgroup_from_json(data["B"])
    iota, pi = hom_from_json(data["iota"]), hom_from_json(data["pi"])
    return Extension(A, G, B, TopHom(iota, A, G), TopHom(pi, G, B))


def diagram_to_json(d: diagrams.Diagram) -> dict:
    return {
        "nodes": {name: topgroup_to_json(t) for name, t in d.nodes.items()},
        "edges": {
            name: {"from": e.src, "to": e.dst, "hom": hom_to_json(e.hom)}
            for name, e in d.edges.items()
        },
        "squares": [[list(pa), list(pb)] for pa, pb in d.squares],
        "rows": [{"edges": list(r.edges), "kind": r.kind} for r in d.rows],
    }


def diagram_from_json(data) -> diagrams.Diagram:
    nodes = {name: topgroup_from_json(t) for name, t in data["nodes"].items()}
    edges = {
        name: diagrams.Edge(e["from"], e["to"], hom_from_json(e["hom"]))
        for name, e in data["edges"].items()
    }
    squares = tuple((tuple(pa), tuple(pb)) for pa, pb in data.get("squares", []))
    rows = tuple(
        diagrams.Row(tuple(r["edges"]), r["kind"]) for r in data.get("rows", [])
    )
    return diagrams.Diagram(nodes, edges, squares, rows)
