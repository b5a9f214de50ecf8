"""Command-line entry point.

Subcommands: ``gen`` (synthetic datasets), ``hsp graph``/``hsp verify``
(proximity-graph export and property checks), ``classify`` (one prediction
per query line), ``bench`` (accuracy sweep to CSV) and ``index build``/
``index info`` (binary small-world index files).

Exit codes: 0 success, 2 usage error, 3 data/format error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .bench import best_accuracy, config_from_json, run_experiment, write_report_csv
from .classifiers import (
    classify_asymptotic_hsp,
    classify_hsp,
    classify_knn,
    classify_probabilistic_asymptotic_hsp,
    classify_probabilistic_knn,
)
from .errors import (
    ContractViolationError,
    DataError,
    DimensionMismatchError,
    EmptyCandidatesError,
    EmptyDatasetError,
    EmptyNeighborhoodError,
    FormatError,
    HspError,
    StaleIndexError,
)
from .hsp import (
    build_hsp_graph,
    check_neighborhood,
    empirical_stretch,
    out_degree_stats,
    verify_mst_containment,
)
from .index import IndexParams, SmallWorldIndex, build_index
from .io import load_dataset, load_vectors, save_fvecs, save_labels
from .synthetic import GeneratorSpec, generate

_K_FAMILY = {"knn", "pknn", "ahsp", "pahsp"}
_INDEXED = {"pknn", "pahsp"}


class _UsageError(Exception):
    """Bad flag combination caught after argparse."""


def _json_arg(value: str) -> str:
    """Accept inline JSON (starts with '{') or a path to a JSON file."""
    stripped = value.strip()
    if stripped.startswith("{"):
        return stripped
    with open(value, "r", encoding="utf-8") as fh:
        return fh.read()


def _add_index_flags(parser) -> None:
    parser.add_argument("--m", type=int, default=16, metavar="M",
                        help="max neighbors per node above the base layer")
    parser.add_argument("--ef-construction", type=int, default=200)
    parser.add_argument("--ef-search", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)


def _index_params(args) -> IndexParams:
    return IndexParams(max_neighbors=args.m,
                       ef_construction=args.ef_construction,
                       ef_search=args.ef_search,
                       seed=args.seed)


def _cmd_gen(args) -> int:
    spec = GeneratorSpec.from_json(_json_arg(args.spec))
    data = generate(spec)
    save_fvecs(args.out, data.vectors)
    save_labels(args.labels_out, data.labels)
    print(f"wrote {data.n} vectors (dim {data.dim}, "
          f"{data.num_classes} classes) to {args.out}")
    return 0


def _cmd_hsp_graph(args) -> int:
    vectors = load_vectors(args.data)
    graph = build_hsp_graph(vectors)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(graph.to_text())
    print(f"wrote adjacency for {graph.n} nodes to {args.out}")
    return 0


def _cmd_hsp_verify(args) -> int:
    vectors = load_vectors(args.data)
    graph = build_hsp_graph(vectors)
    n = graph.n
    failures = 0

    all_ids = np.arange(n, dtype=np.int64)
    try:
        for u, nb in enumerate(graph.neighborhoods):
            check_neighborhood(vectors, vectors[u], all_ids[all_ids != u], nb)
        print(f"survivor/elimination invariants: ok ({n} nodes)")
    except ContractViolationError as exc:
        print(f"survivor/elimination invariants: FAILED ({exc})")
        failures += 1

    dmin, dmax, dmean = out_degree_stats(graph)
    print(f"out-degree: min {dmin}, max {dmax}, mean {dmean:.2f}")

    if n >= 2:
        ok, missing = verify_mst_containment(graph, vectors)
        if ok:
            print("minimum spanning tree containment: ok")
        else:
            print(f"minimum spanning tree containment: FAILED "
                  f"({len(missing)} edges missing, first {missing[0]})")
            failures += 1

        stretch = empirical_stretch(graph, vectors)
        print(f"max stretch over all pairs: {stretch:.4f}")

    if failures:
        raise ContractViolationError(f"{failures} graph checks failed")
    return 0


def _cmd_classify(args) -> int:
    name = args.classifier
    if name in _K_FAMILY and args.k is None:
        raise _UsageError(f"classifier {name!r} requires --k")
    dataset = load_dataset(args.data, args.labels)
    queries = load_vectors(args.queries)
    if queries.shape[0] == 0:
        raise DataError(f"{args.queries}: no query vectors")
    if queries.shape[1] != dataset.dim:
        raise DataError(
            f"query dimension {queries.shape[1]} does not match "
            f"dataset dimension {dataset.dim}"
        )

    index = None
    if name in _INDEXED:
        index = build_index(dataset, _index_params(args))

    for q in queries:
        if name == "knn":
            pred = classify_knn(dataset, q, args.k, args.rule)
        elif name == "pknn":
            pred = classify_probabilistic_knn(index, dataset, q, args.k,
                                              args.rule)
        elif name == "hsp":
            pred = classify_hsp(dataset, q, args.rule)
        elif name == "ahsp":
            pred = classify_asymptotic_hsp(dataset, q, args.k, args.rule)
        else:
            pred = classify_probabilistic_asymptotic_hsp(index, dataset, q,
                                                         args.k, args.rule)
        print(pred.label)
    return 0


def _cmd_bench(args) -> int:
    config = config_from_json(_json_arg(args.config))
    t0 = time.perf_counter()
    report = run_experiment(config)
    write_report_csv(report, args.out)
    elapsed = time.perf_counter() - t0
    print(f"wrote {len(report.rows)} rows to {args.out} "
          f"({elapsed:.1f}s, train {report.n_train}, test {report.n_test}, "
          f"dim {report.dim})", file=sys.stderr)
    seen = []
    for row in report.rows:
        key = (row.classifier, row.rule)
        if key not in seen:
            seen.append(key)
    for name, rule in seen:
        best = best_accuracy(report, name, rule)
        print(f"  {name}/{rule}: best {best:.2f}%", file=sys.stderr)
    return 0


def _cmd_index_build(args) -> int:
    vectors = load_vectors(args.data)
    index = build_index(vectors, _index_params(args))
    index.save(args.out)
    levels = len(index.layers)
    print(f"indexed {index.n} vectors ({levels} levels, "
          f"entry point {index.entry_point}); wrote {args.out}")
    return 0


def _cmd_index_info(args) -> int:
    index = SmallWorldIndex.load(args.index)
    p = index.params
    print(f"max_neighbors: {p.max_neighbors}")
    print(f"ef_construction: {p.ef_construction}")
    print(f"ef_search: {p.ef_search}")
    print(f"level_scale: {p.resolved_level_scale:.6f}")
    print(f"seed: {p.seed}")
    print(f"dataset_fingerprint: {index.dataset_fingerprint:#018x}")
    print(f"entry_point: {index.entry_point}")
    print(f"levels: {len(index.layers)}")
    for lvl, layer in enumerate(index.layers):
        print(f"  level {lvl}: {len(layer)} nodes")
    print(f"level-0 reachable from entry: {index.level0_reachable()}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hspclassify",
        description="Half-space proximal neighborhoods, classifiers and "
                    "benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic labeled dataset")
    gen.add_argument("--spec", required=True,
                     help="generator spec: inline JSON or a path to one")
    gen.add_argument("--out", required=True, help="output vector file (fvecs)")
    gen.add_argument("--labels-out", required=True,
                     help="output labels file (one integer per line)")
    gen.set_defaults(handler=_cmd_gen)

    hsp = sub.add_parser("hsp", help="proximity-graph tools")
    hsp_sub = hsp.add_subparsers(dest="hsp_command", required=True)
    hg = hsp_sub.add_parser("graph", help="export the adjacency as text")
    hg.add_argument("--data", required=True, help="vector file (fvecs or csv)")
    hg.add_argument("--out", required=True, help="output adjacency text file")
    hg.set_defaults(handler=_cmd_hsp_graph)
    hv = hsp_sub.add_parser(
        "verify",
        help="check selection invariants, spanning-tree containment and "
             "stretch on a (small) vector file",
    )
    hv.add_argument("--data", required=True, help="vector file (fvecs or csv)")
    hv.set_defaults(handler=_cmd_hsp_verify)

    cls = sub.add_parser("classify", help="predict labels for query vectors")
    cls.add_argument("--data", required=True,
                     help="training vectors (fvecs or csv with labels)")
    cls.add_argument("--labels",
                     help="training labels (required with fvecs data)")
    cls.add_argument("--queries", required=True,
                     help="query vectors (fvecs or csv of floats)")
    cls.add_argument("--classifier", required=True,
                     choices=["knn", "pknn", "hsp", "ahsp", "pahsp"])
    cls.add_argument("--k", type=int,
                     help="neighborhood size (ignored by hsp)")
    cls.add_argument("--rule", default="majority",
                     choices=["majority", "dudani", "invdist"])
    _add_index_flags(cls)
    cls.set_defaults(handler=_cmd_classify)

    bench = sub.add_parser("bench", help="run an accuracy sweep to CSV")
    bench.add_argument("--config", required=True,
                       help="experiment config: inline JSON or a path to one")
    bench.add_argument("--out", required=True, help="output CSV path")
    bench.set_defaults(handler=_cmd_bench)

    idx = sub.add_parser("index", help="small-world index files")
    idx_sub = idx.add_subparsers(dest="index_command", required=True)
    ib = idx_sub.add_parser("build", help="build and save an index")
    ib.add_argument("--data", required=True, help="vector file (fvecs or csv)")
    ib.add_argument("--out", required=True, help="output index path")
    _add_index_flags(ib)
    ib.set_defaults(handler=_cmd_index_build)
    ii = idx_sub.add_parser("info", help="print index parameters and layout")
    ii.add_argument("--index", required=True, help="index file to inspect")
    ii.set_defaults(handler=_cmd_index_info)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (FormatError, DataError, DimensionMismatchError, EmptyDatasetError,
            EmptyCandidatesError, EmptyNeighborhoodError,
            StaleIndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # bad parameter values that slipped past argparse (e.g. --m 1)
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except HspError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # final guard: never leak a traceback
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
