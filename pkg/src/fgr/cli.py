"""Command-line front end.

Every verb reads all of its state from flags (no config files or
environment variables), writes data to stdout as JSON by default or TSV
with ``--format tsv``, and is byte-deterministic: identical invocations
produce identical output.  Exit codes: 0 success, 1 domain error
(message on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .abelian import transfer
from .constructions import gamma_graph, hm_graph, lm_graph, wk_square_rewrite, wk_word
from .retracts import bergman_counterexample, intersection_report, run_suite, suite_names
from .stallings import (
    CoreGraph,
    basis,
    canonical_relabeling,
    contains,
    fold,
    from_generators,
    graph_from_json,
    graph_to_json,
    rewrite_in_basis,
    spanning_tree,
)
from .abelian import is_visible, is_visible_in_subgroup
from .words import parse_word, render_word


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgr",
        description="Subgroup calculus for free groups: Stallings graphs, "
        "visibility, transfer maps, and retract intersections.",
    )
    parser.add_argument("--format", choices=("json", "tsv"), default="json")
    verbs = parser.add_subparsers(dest="verb", required=True)

    def add_subgroup_flags(p: argparse.ArgumentParser, suffix: str = "") -> None:
        p.add_argument(f"--gens{suffix}", help="comma-separated generator word expressions")
        p.add_argument(f"--graph{suffix}", help="path to a graph JSON file")

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return verbs.add_parser(name, help=help_text)

    p = add("fold", "fold a raw graph or generator wedge into a core graph")
    p.add_argument("--rank", type=int)
    add_subgroup_flags(p)

    p = add("basis", "free basis induced by a spanning tree")
    p.add_argument("--rank", type=int)
    add_subgroup_flags(p)
    p.add_argument("--tree", help="comma list of from:to:label tree edges")

    p = add("member", "test membership of a word in a subgroup")
    p.add_argument("--rank", type=int)
    add_subgroup_flags(p)
    p.add_argument("--word", required=True)

    p = add("rewrite", "express a member word over the subgroup basis")
    p.add_argument("--rank", type=int)
    add_subgroup_flags(p)
    p.add_argument("--tree")
    p.add_argument("--word", required=True)

    p = add("intersect", "intersection report for a subgroup and a retract")
    p.add_argument("--rank", type=int)
    add_subgroup_flags(p)
    add_subgroup_flags(p, suffix="2")

    p = add("visible", "visibility of a word, ambient or inside a subgroup")
    p.add_argument("--rank", type=int)
    add_subgroup_flags(p)
    p.add_argument("--tree")
    p.add_argument("--word", required=True)

    p = add("transfer", "transfer of a word into a finite-index subgroup")
    p.add_argument("--rank", type=int)
    add_subgroup_flags(p)
    p.add_argument("--tree")
    p.add_argument("--word", required=True)

    for name in ("gamma", "hm", "lm"):
        p = add(name, f"emit the {name} graph for a given m")
        p.add_argument("--m", type=int, required=True)

    p = add("wk", "emit the word x[x,y]^k")
    p.add_argument("--k", type=int, required=True)

    p = add("lemma33", "closed-form basis rewrite of wk^2 for odd m")
    p.add_argument("--m", type=int, required=True)

    p = add("bergman", "retract-intersection counterexample report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("suite", "run a randomized property suite")
    p.add_argument("name", choices=suite_names())
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _split_generators(text: str) -> list[str]:
    """Split a generator list on commas outside brackets and parens."""
    chunks = []
    depth = 0
    current = []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "," and depth == 0:
            chunks.append("".join(current))
            current = []
        else:
            current.append(ch)
    chunks.append("".join(current))
    return chunks


def _load_graph(args: argparse.Namespace, suffix: str = "") -> CoreGraph:
    gens = getattr(args, f"gens{suffix}")
    path = getattr(args, f"graph{suffix}")
    if (gens is None) == (path is None):
        raise ValueError(f"give exactly one of --gens{suffix} or --graph{suffix}")
    if gens is not None:
        if args.rank is None:
            raise ValueError("--gens needs --rank")
        words = [parse_word(text, args.rank) for text in _split_generators(gens)]
        return from_generators(args.rank, words)
    with open(path, encoding="utf-8") as handle:
        return graph_from_json(json.load(handle))


def _parse_tree_flag(graph: CoreGraph, text: str | None):
    if text is None:
        return spanning_tree(graph)
    edges = []
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ValueError(f"tree edge {chunk!r} is not from:to:label")
        edges.append(tuple(int(p) for p in parts))
    return spanning_tree(graph, override=edges)


def _render_tree(tree_edges) -> list[str]:
    return [f"{u}:{v}:{l}" for (u, v, l) in sorted(tree_edges)]


def _emit(payload, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
        return
    if isinstance(payload, dict):
        for key in sorted(payload):
            sys.stdout.write(f"{key}\t{_tsv_cell(payload[key])}\n")
    elif isinstance(payload, list):
        for item in payload:
            sys.stdout.write(f"{_tsv_cell(item)}\n")
    else:
        sys.stdout.write(f"{_tsv_cell(payload)}\n")


def _tsv_cell(value) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True)


def _dispatch(args: argparse.Namespace) -> object:
    if args.verb == "fold":
        if args.graph is not None:
            with open(args.graph, encoding="utf-8") as handle:
                data = json.load(handle)
            graph = fold(
                int(data["rank"]),
                int(data["vertices"]),
                [(int(e["from"]), int(e["to"]), int(e["label"])) for e in data["edges"]],
                int(data.get("base", 0)),
            )
        else:
            graph = _load_graph(args)
        return graph_to_json(graph)

    if args.verb == "basis":
        graph = _load_graph(args)
        tree = _parse_tree_flag(graph, args.tree)
        return [render_word(w) for w in basis(graph, tree)]

    if args.verb == "member":
        graph = _load_graph(args)
        word = parse_word(args.word, graph.rank)
        return {"member": contains(graph, word)}

    if args.verb == "rewrite":
        graph = _load_graph(args)
        tree = _parse_tree_flag(graph, args.tree)
        word = parse_word(args.word, graph.rank)
        return list(rewrite_in_basis(graph, tree, word).letters)

    if args.verb == "intersect":
        subgroup = _load_graph(args)
        other = _load_graph(args, suffix="2")
        return intersection_report(subgroup, other).to_json()

    if args.verb == "visible":
        if getattr(args, "gens") is None and getattr(args, "graph") is None:
            if args.rank is None:
                raise ValueError("ambient visibility needs --rank")
            word = parse_word(args.word, args.rank)
            return {"visible": is_visible(word)}
        graph = _load_graph(args)
        tree = _parse_tree_flag(graph, args.tree)
        word = parse_word(args.word, graph.rank)
        return {"visible": is_visible_in_subgroup(graph, tree, word)}

    if args.verb == "transfer":
        graph = _load_graph(args)
        tree = _parse_tree_flag(graph, args.tree)
        word = parse_word(args.word, graph.rank)
        return transfer(graph, tree, word).to_json()

    if args.verb == "gamma":
        return graph_to_json(gamma_graph(args.m))

    if args.verb == "hm":
        graph, tree = hm_graph(args.m)
        relabel = canonical_relabeling(graph)
        payload = graph_to_json(graph)
        payload["tree"] = _render_tree(
            (relabel[u], relabel[v], l) for (u, v, l) in tree.tree_edges
        )
        return payload

    if args.verb == "lm":
        return graph_to_json(lm_graph(args.m))

    if args.verb == "wk":
        return render_word(wk_word(args.k))

    if args.verb == "lemma33":
        return list(wk_square_rewrite(args.m).letters)

    if args.verb == "bergman":
        return bergman_counterexample(args.n, args.m, args.k).to_json()

    if args.verb == "suite":
        return run_suite(args.name, args.trials, args.seed).to_json()

    raise AssertionError(f"unhandled verb {args.verb!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload = _dispatch(args)
    except (ValueError, OverflowError, OSError) as exc:
        sys.stderr.write(f"fgr: error: {exc}\n")
        return 1
    _emit(payload, args.format)
    return 0


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
