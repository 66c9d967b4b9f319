"""Command-line front end: ``caprese reconstruct|simulate|benchmark|bootstrap|convert``.

Human-readable summaries go to stdout, machine output to files. Exit codes:
0 success, 1 invalid data, 2 I/O failure, 64 usage error. Relative output
paths are resolved against ``$CAPRESE_OUTPUT_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bench import PRESETS, load_plan, run_plan
from .bootstrap import nonparametric_bootstrap, parametric_bootstrap
from .errors import CapreseError, ConfigError, ValidationError
from .forest import ProgressionForest
from .genotype import ROOT, merge_indistinguishable, read_matrix, write_matrix
from .probability import NoiseSpec
from .reconstruct import ALGORITHMS, reconstruct
from .synthesis import (GenerativeModel, GeneratorConfig, apply_noise, make_rng, random_dag,
                        random_forest, random_tree, sample)

EXIT_OK, EXIT_DATA, EXIT_IO, EXIT_USAGE = 0, 1, 2, 64
DEFAULT_SEED = 20140101
OUTPUT_ENV = "CAPRESE_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _unit_interval(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{v} is outside [0, 1]")
    return v


def _noise_level(text):
    v = _unit_interval(text)
    if v >= 1.0:
        raise argparse.ArgumentTypeError("noise must be < 1")
    return v


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _random_spec(text):
    parts = text.split(",")
    if len(parts) != 3 or parts[2] not in ("tree", "forest", "dag"):
        raise argparse.ArgumentTypeError("expected n,k,kind with kind in tree|forest|dag")
    try:
        return int(parts[0]), int(parts[1]), parts[2]
    except ValueError:
        raise argparse.ArgumentTypeError("n and k must be integers")


def _out_path(path, default_name):
    base = Path(os.environ.get(OUTPUT_ENV, "."))
    p = Path(path) if path else Path(default_name)
    return p if p.is_absolute() else base / p


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _load_forest(path: Path) -> ProgressionForest:
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".dot":
        return ProgressionForest.from_dot(text)
    return ProgressionForest.from_json(text)


def _forest_text(forest, path: Path):
    return forest.to_dot() if path.suffix.lower() == ".dot" else forest.to_json()


def _read_input(args):
    m = read_matrix(args.input)
    merged = {}
    if args.merge:
        m, merged = merge_indistinguishable(m)
    return m, merged


# -- subcommands ---------------------------------------------------------


def cmd_reconstruct(args):
    m, merged = _read_input(args)
    forest = reconstruct(m, args.algo, args.lam)
    out = _out_path(args.out, f"{args.algo}.json")
    _write(out, _forest_text(forest, out))
    n_edges = sum(1 for v in forest.nodes if forest.parent[v] != ROOT)
    print(f"{args.algo}: {len(forest.nodes)} events, {n_edges} event-to-event edges, "
          f"{len(forest.roots())} independent progressions")
    for composite, members in merged.items():
        print(f"merged indistinguishable events {', '.join(members)} into {composite}")
    for w in forest.warnings:
        print(f"warning: {w}")
    print(f"wrote {out}")


def cmd_simulate(args):
    if args.model:
        model = GenerativeModel.from_json(Path(args.model).read_text(encoding="utf-8"))
        model_path = Path(args.model)
    else:
        n, k, kind = args.random
        try:
            cfg = GeneratorConfig(n=n, k=k, seed=args.seed)
        except ConfigError as exc:
            raise UsageError(str(exc))
        gen = {"tree": random_tree, "forest": random_forest, "dag": random_dag}[kind]
        model = gen(cfg, rng=make_rng(args.seed, 0))
        model_path = None
    data = apply_noise(sample(model, args.samples, make_rng(args.seed, 1)), args.noise, make_rng(args.seed, 2))
    out = _out_path(args.out, "samples.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_matrix(data, out)
    if model_path is None:
        model_path = out.with_suffix(".model.json")
        _write(model_path, model.to_json())
    print(f"sampled {data.s} genotypes over {data.n} events (noise {args.noise})")
    print(f"ground truth: {model_path}")
    print(f"wrote {out}")


def cmd_benchmark(args):
    try:
        if args.plan:
            plan = load_plan(args.plan)
        else:
            plan = PRESETS[args.preset]
        if args.seed is not None:
            plan = type(plan).from_dict({**plan.to_dict(), "seed": args.seed})
    except ConfigError as exc:
        raise UsageError(str(exc))
    except (ValueError, TypeError, KeyError) as exc:  # malformed JSON/TOML or field types
        raise UsageError(f"cannot read plan: {exc}")
    report = run_plan(plan, jobs=args.jobs, keep_worst=args.dot)
    out = _out_path(args.out, f"bench-{plan.name}")
    paths = report.write(out, dot=args.dot)
    failed = [c for c in report.cells if c.error]
    print(f"plan {plan.name}: {len(report.cells)} cells, {plan.replicates} models x "
          f"{plan.datasets} datasets, {len(failed)} failed cells")
    for c in report.cells:
        lam = "" if c.lam is None else f" lambda={c.lam}"
        print(f"  {c.algo}{lam} nu={c.nu} s={c.s}: TED {c.mean['ted']:.3f}  "
              f"Hamming {c.mean['hamming']:.3f}")
    print(f"wrote {len(paths)} files under {out}")


def cmd_bootstrap(args):
    m, _ = _read_input(args)
    reference = reconstruct(m, args.algo, args.lam)  # validates the input
    if args.mode == "np":
        rep = nonparametric_bootstrap(m, args.algo, args.lam, args.B, args.seed,
                                      reference=reference, jobs=args.jobs)
    else:
        noise = NoiseSpec(args.eps_plus, args.eps_minus)
        rep = parametric_bootstrap(reference, args.samples or m.s, noise, args.algo, args.lam,
                                   args.B, args.seed, data=m, jobs=args.jobs)
    out = _out_path(args.out, f"bootstrap-{args.mode}.json")
    _write(out, rep.to_json())
    table = out.with_suffix(".edges.csv")
    _write(table, rep.edge_table_csv())
    print(f"{rep.mode} bootstrap, {args.algo}, B={rep.B}: overall confidence {rep.overall_confidence:.3f}"
          f" ({rep.invalid} invalid replicates)")
    for v in rep.reference.nodes:
        u = rep.reference.parent[v]
        print(f"  {u} -> {v}: {rep.confidence(u, v):.3f}")
    print(f"wrote {out} and {table}")


def cmd_convert(args):
    src, dst = Path(args.input), _out_path(args.out, "forest.dot")
    forest = _load_forest(src)
    _write(dst, _forest_text(forest, dst))
    print(f"converted {src} -> {dst} ({len(forest.nodes)} events)")


# -- parser ----------------------------------------------------------------


def build_parser():
    p = _Parser(prog="caprese", description="Cancer progression inference from cross-sectional data.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_input(sp):
        sp.add_argument("--input", "-i", required=True, help="genotype matrix (CSV or TSV)")
        sp.add_argument("--merge", action="store_true",
                        help="merge indistinguishable events into composites first")

    def add_algo(sp):
        sp.add_argument("--algo", choices=ALGORITHMS, default="caprese")
        sp.add_argument("--lambda", dest="lam", type=_unit_interval, default=0.5,
                        help="shrinkage coefficient in [0, 1] (default 0.5)")

    r = sub.add_parser("reconstruct", help="infer a progression forest")
    add_input(r)
    add_algo(r)
    r.add_argument("--out", "-o", help="output file, .json or .dot")
    r.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("simulate", help="sample a synthetic dataset")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--model", help="generative model JSON")
    g.add_argument("--random", type=_random_spec, metavar="N,K,KIND", help="random model, e.g. 20,1,tree")
    s.add_argument("--samples", "-s", type=_positive, required=True)
    s.add_argument("--noise", type=_noise_level, default=0.0)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--out", "-o", help="output CSV")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("benchmark", help="run an experiment plan")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--plan", help="plan file (.json or .toml)")
    g.add_argument("--preset", choices=sorted(PRESETS))
    b.add_argument("--out", "-o", help="output directory")
    b.add_argument("--seed", type=int, default=None, help="override the plan's master seed")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--dot", action="store_true", help="dump the worst replicate of each cell as DOT")
    b.set_defaults(func=cmd_benchmark)

    bs = sub.add_parser("bootstrap", help="bootstrap confidence of a reconstruction")
    add_input(bs)
    add_algo(bs)
    bs.add_argument("--mode", choices=("np", "p"), default="np")
    bs.add_argument("--B", type=_positive, default=1000)
    bs.add_argument("--samples", type=_positive, default=None,
                    help="rows per parametric replicate (default: input size)")
    bs.add_argument("--eps-plus", type=_noise_level, default=0.0)
    bs.add_argument("--eps-minus", type=_noise_level, default=0.0)
    bs.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bs.add_argument("--jobs", type=int, default=1)
    bs.add_argument("--out", "-o", help="report JSON; the edge table goes next to it")
    bs.set_defaults(func=cmd_bootstrap)

    c = sub.add_parser("convert", help="transcode a forest between JSON and DOT")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--out", "-o", required=True)
    c.set_defaults(func=cmd_convert)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"caprese {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"caprese {args.command}: {exc}", file=sys.stderr)
        print("hint: --merge combines indistinguishable events; constant events must be removed",
              file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"caprese {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CapreseError, ValueError, KeyError) as exc:
        print(f"caprese {args.command}: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
