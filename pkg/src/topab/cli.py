"""Command-line front end: verify, search, extend, dual, sections, report.

Exit codes: 0 success (for verify: zero conclusion failures), 1 conclusion
failures found in verify mode, 2 usage or malformed input, 3 domain rejection
(a non-topologizing section).  All outputs are deterministic given the inputs
and seed; TOPAB_THREADS sets the worker count for verify/search runs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    NotTopologizing,
    TopabError,
    UnknownHypothesis,
    UnknownTheorem,
)
from .extensions import (
    Section,
    alg_extension_from_cocycle,
    canonical_section,
    enumerate_sections,
    factor_set_from_section,
    is_topologizing,
    nagao_core,
    nagao_topology,
    realize_cocycle,
)
from .duality import dual_group
from . import jsonio
from .search import FamilySpec, SearchTask, run_search


def _read(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _emit(data: dict, out: str | None) -> None:
    text = jsonio.dumps(data) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _family_from_args(args) -> FamilySpec:
    return FamilySpec(
        max_group_order=args.max_order,
        max_cocycle_count="all" if args.max_cocycles is None else args.max_cocycles,
        seed=args.seed,
        generators=tuple(args.strata.split(",")) if args.strata else (),
        sample_count=args.sample,
    )


def _run_and_write(task: SearchTask, out_dir: str | None, threads: int | None):
    result = run_search(task, threads=threads)
    jsonl = result.to_jsonl()
    md = result.to_markdown()
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        stem = task.theorem_id
        (d / f"{stem}.jsonl").write_text(jsonl, encoding="utf-8")
        (d / f"{stem}.md").write_text(md, encoding="utf-8")
    sys.stdout.write(md)
    return result


def cmd_verify(args) -> int:
    task = SearchTask(args.theorem, (), _family_from_args(args))
    try:
        result = _run_and_write(task, args.out, args.threads)
    except UnknownTheorem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if result.failure_count == 0 else 1


def cmd_search(args) -> int:
    task = SearchTask(
        args.theorem,
        tuple(args.drop or ()),
        _family_from_args(args),
        stop_at_first=args.stop_at_first,
    )
    try:
        result = _run_and_write(task, args.out, args.threads)
    except (UnknownTheorem, UnknownHypothesis) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"witnesses: {result.failure_count}")
    return 0


def cmd_extend(args) -> int:
    try:
        a_top = jsonio.topgroup_from_json(_read(args.kernel))
        b_top = jsonio.topgroup_from_json(_read(args.quotient))
        h = jsonio.cocycle_from_json(_read(args.cocycle))
        if h.A != a_top.group or h.B != b_top.group:
            raise TopabError("cocycle groups do not match the given groups")
        real = realize_cocycle(a_top.group, b_top.group, h)
        alg = alg_extension_from_cocycle(a_top, b_top, h)
        if args.section:
            data = _read(args.section)
            mapping = {}
            for b_raw, g_raw in data["table"]:
                b = b_top.group.reduce(b_raw)
                pair_a = a_top.group.reduce(g_raw[: a_top.group.rank])
                pair_b = b_top.group.reduce(g_raw[a_top.group.rank :])
                mapping[b] = real.from_pair[(pair_a, pair_b)]
            s = Section(b_top.group, alg.G, tuple(mapping.items()))
        else:
            s = canonical_section(alg)
    except (TopabError, KeyError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        ext = nagao_topology(alg, s)
    except NotTopologizing as exc:
        print(f"not topologizing: {exc}", file=sys.stderr)
        return 3
    out = {
        "group": jsonio.group_to_json(ext.G.group),
        "open_core": jsonio.subgroup_to_json(ext.G.open_core),
        "theta_table": [
            [list(a) + list(b), jsonio.element_to_json(real.from_pair[(a, b)])]
            for (a, b) in sorted(real.from_pair)
        ],
    }
    _emit(out, args.out)
    return 0


def cmd_dual(args) -> int:
    try:
        t = jsonio.topgroup_from_json(_read(args.group))
    except TopabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    d = dual_group(t)
    _emit(jsonio.dual_to_json(d), args.out)
    return 0


def cmd_sections(args) -> int:
    try:
        alg = jsonio.alg_extension_from_json(_read(args.extension))
    except (TopabError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sections = list(enumerate_sections(alg))
    topologizing = []
    cores = []
    for i, s in enumerate(sections):
        hs = factor_set_from_section(alg, s)
        if is_topologizing(alg.A, alg.B, hs):
            topologizing.append(i)
            cores.append(nagao_core(alg, s).elements)
        else:
            cores.append(None)
    classes: dict[tuple, list[int]] = {}
    for i in topologizing:
        classes.setdefault(cores[i], []).append(i)
    out = {
        "sections": [jsonio.section_to_json(s) for s in sections],
        "topologizing": topologizing,
        "topology_classes": [
            {
                "open_core": [jsonio.element_to_json(x) for x in core],
                "sections": idxs,
            }
            for core, idxs in sorted(classes.items())
        ],
    }
    _emit(out, args.out)
    return 0


def cmd_report(args) -> int:
    lines = []
    try:
        text = Path(args.reports).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    summary = next((r for r in records if r.get("type") == "summary"), None)
    failures = [r for r in records if r.get("type") == "failure"]
    if summary is None:
        print("error: no summary record found", file=sys.stderr)
        return 2
    task = summary["task"]
    lines += [
        f"# {task['theorem']}",
        "",
        f"- dropped hypotheses: {', '.join(task['dropped_hypotheses']) or 'none'}",
        f"- evaluated: {summary['evaluated']} (filtered: {summary['filtered']})",
        f"- failures: {summary['failures']}",
    ]
    for i, r in enumerate(failures):
        bad = [d["name"] for d in r["details"] if not d["ok"]]
        lines.append(f"- failure {i}: {', '.join(bad)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="topab",
        description="Verify or refute continuity-transfer laws over finite "
        "topological abelian groups.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_family_flags(sp):
        sp.add_argument("--max-order", type=int, default=4)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--sample", type=int, default=400)
        sp.add_argument("--max-cocycles", type=int, default=None)
        sp.add_argument("--strata", type=str, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--threads", type=int, default=None)

    sp = sub.add_parser("verify", help="run a theorem over its default family")
    sp.add_argument("theorem", choices=None, metavar="THEOREM")
    add_family_flags(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("search", help="drop hypotheses and hunt for witnesses")
    sp.add_argument("theorem", metavar="THEOREM")
    sp.add_argument("--drop", action="append", metavar="HYPOTHESIS")
    sp.add_argument("--stop-at-first", action="store_true")
    add_family_flags(sp)
    sp.set_defaults(fn=cmd_search)

    sp = sub.add_parser("extend", help="twist two groups by a cocycle")
    sp.add_argument("kernel", help="topological group JSON for the kernel")
    sp.add_argument("quotient", help="topological group JSON for the quotient")
    sp.add_argument("cocycle", help="factor set JSON")
    sp.add_argument("--section", help="section JSON (pair coordinates)")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_extend)

    sp = sub.add_parser("dual", help="Pontryagin dual of a topological group")
    sp.add_argument("group")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_dual)

    sp = sub.add_parser("sections", help="section census of an extension")
    sp.add_argument("extension")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_sections)

    sp = sub.add_parser("report", help="render a JSONL report as Markdown")
    sp.add_argument("reports")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_report)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
