"""Command-line pipeline.

Every stage reads the files written by the previous one::

    authornet --manifest m.json ingest
    authornet --manifest m.json overlap --domain alpha
    authornet --manifest m.json noise --domain-a alpha --domain-b beta
    authornet --manifest m.json stats --domain alpha --noise-model out/noise/alpha__beta.noise.json
    authornet --manifest m.json network --domain alpha --noise-model out/noise/alpha__beta.noise.json
    authornet simulate --n 1000 --m 10000 --p 1.05e-5 --trials 100000

Exit codes: 0 success, 1 usage error, 2 input-data error, 3 numerical-domain error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import ingest, montecarlo, network, noise, overlap
from .errors import CapacityError, ConfigurationError, DomainError, FormatError, ScanError
from .manifest import SessionManifest

log = logging.getLogger("authornet")

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class UsageError(ScanError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _safe(name):
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def _write(path: Path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)
    log.info("wrote %s", path)


def _manifest(args) -> SessionManifest:
    if not args.manifest:
        raise UsageError("this command needs --manifest")
    return SessionManifest.load(args.manifest)


def _out_dir(args, manifest=None) -> Path:
    if args.out:
        return Path(args.out)
    if manifest is not None:
        return manifest.resolve(manifest.output_dir)
    return Path("out")


def _load_lists(out: Path, names):
    lists = []
    for name in names:
        path = out / "lists" / f"{_safe(name)}.txt"
        if not path.exists():
            raise FormatError("missing author list; run `ingest` first", path=path)
        lists.append(ingest.read_author_list(path, name))
    return lists


def _load_matrix(out: Path, manifest, domain):
    path = out / "overlap" / f"{_safe(domain)}.pairs.csv"
    if not path.exists():
        raise FormatError("missing overlap matrix; run `overlap` first", path=path)
    return overlap.parse_pairs_csv(path.read_text(encoding="utf-8"), sorted(manifest.domain(domain)))


def _load_noise(path):
    try:
        return noise.noise_model_from_json(Path(path).read_text(encoding="utf-8"))
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"invalid noise model: {exc}", path=path) from None


def cmd_ingest(args):
    manifest = _manifest(args)
    out = _out_dir(args, manifest)
    rows = ["area,records,raw_names,failed,unique"]
    failed_files = []
    for name in sorted(manifest.areas):
        src = manifest.areas[name]
        path = manifest.resolve(src.path)
        try:
            records = ingest.read_records(path, src.format, **src.options)
        except (FormatError, OSError) as exc:
            log.error("%s: %s", name, exc)
            failed_files.append(str(path))
            continue
        area = ingest.build_area_list(records, name)
        if area.size == 0:
            log.warning("%s: no authors found", name)
        raw = sum(len(r.authors) for r in records)
        log.info("%s: %d records, %d names, %d unique", name, len(records), raw, area.size)
        rows.append(f"{name},{len(records)},{raw},{area.n_failed},{area.size}")
        _write(out / "lists" / f"{_safe(name)}.txt", ingest.format_author_lines(area))
    _write(out / "lists" / "counts.csv", "\n".join(rows) + "\n")
    if failed_files:
        raise FormatError(f"could not parse {', '.join(failed_files)}")


def cmd_overlap(args):
    manifest = _manifest(args)
    out = _out_dir(args, manifest)
    domains = [args.domain] if args.domain else sorted(manifest.domains)
    for domain in domains:
        lists = _load_lists(out, sorted(manifest.domain(domain)))
        matrix = overlap.overlap_matrix(lists, threads=args.threads)
        _write(out / "overlap" / f"{_safe(domain)}.pairs.csv", overlap.format_pairs_csv(matrix))
        _write(out / "overlap" / f"{_safe(domain)}.matrix.csv", overlap.format_square_csv(matrix))


def cmd_noise(args):
    manifest = _manifest(args)
    out = _out_dir(args, manifest)
    a = _load_lists(out, sorted(manifest.domain(args.domain_a)))
    b = _load_lists(out, sorted(manifest.domain(args.domain_b)))
    sample = noise.cross_noise_sample(a, b)
    model = noise.noise_model(sample)
    hist = noise.histogram(sample, args.bins, tuple(args.range) if args.range else None)
    stem = out / "noise" / f"{_safe(args.domain_a)}__{_safe(args.domain_b)}"
    _write(Path(f"{stem}.noise.json"), noise.noise_model_to_json(model))
    _write(Path(f"{stem}.sample.csv"), noise.sample_to_csv(sample))
    _write(Path(f"{stem}.hist.csv"), noise.histogram_to_csv(hist))
    _write(Path(f"{stem}.hist.json"), noise.histogram_to_json(hist))
    log.info("noise floor: median %.6g, mean %.6g over %d pairs", model.median_p0, model.mean_p0, len(sample))


def _summaries_fixture(path):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return (
            {name: noise.summary_from_dict(d) for name, d in doc["domains"].items()},
            noise.summary_from_dict(doc["noise"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid summaries file: {exc!r}", path=path) from None


def cmd_stats(args):
    if args.summaries:
        domains, noise_summary = _summaries_fixture(args.summaries)
        out = Path(args.out) if args.out else Path("out")
        stem = Path(args.summaries).stem
    else:
        if not args.domain or not args.noise_model:
            raise UsageError("stats needs --domain and --noise-model (or --summaries)")
        manifest = _manifest(args)
        out = _out_dir(args, manifest)
        model = _load_noise(args.noise_model)
        noise_summary = noise.summarize(model.sample)
        domains = {}
        for domain in args.domain:
            sample = noise.within_sample(_load_matrix(out, manifest, domain))
            domains[domain] = noise.summarize(sample)
            if args.bins:
                hist = noise.histogram(sample, args.bins, tuple(args.range) if args.range else None)
                _write(out / "stats" / f"{_safe(domain)}.hist.csv", noise.histogram_to_csv(hist))
        stem = "__".join(_safe(d) for d in args.domain)
    report = noise.stats_report(domains, noise_summary)
    _write(out / "stats" / f"{stem}.stats.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    table = noise.format_stats_table(report)
    _write(out / "stats" / f"{stem}.stats.txt", table)
    sys.stdout.write(table)


def cmd_network(args):
    manifest = _manifest(args)
    out = _out_dir(args, manifest)
    matrix = _load_matrix(out, manifest, args.domain)
    model = _load_noise(args.noise_model)
    graph = network.build_graph(matrix, model, args.threshold, args.noise_statistic)
    ext = {"graphml": "graphml", "dot": "dot", "json": "json", "csv-edgelist": "edges.csv"}
    for fmt in args.format:
        _write(out / "network" / f"{_safe(args.domain)}.{ext[fmt]}", network.export_graph(graph, fmt))
    log.info("%s: %d of %d edges above threshold", args.domain, len(graph.included_edges()), len(graph.edges))


def cmd_simulate(args):
    seed = args.seed
    if seed is None:
        seed = _manifest(args).seed if args.manifest else 0
    out = _out_dir(args)
    if args.grid:
        grid = json.loads(Path(args.grid).read_text(encoding="utf-8"))
        report = montecarlo.validate_grid(
            grid["n"], grid["m"], grid["p"], trials=grid.get("trials"), seed=seed,
            target_rel_stderr=grid.get("target_rel_stderr"), threads=args.threads,
        )
        _write(out / "simulate" / "grid.csv", report.to_csv())
        _write(out / "simulate" / "grid.json", report.to_json())
        sys.stdout.write(report.to_json())
        return
    if None in (args.n, args.m, args.p):
        raise UsageError("simulate needs --n, --m and --p, or --grid")
    config = montecarlo.McConfig(args.n, args.m, args.p, args.trials, seed)
    res = montecarlo.mc_expected_matches(config, threads=args.threads)
    doc = {
        "n": config.n, "m": config.m, "p": config.p, "trials": res.trials, "seed": seed,
        "mean_matches": res.mean_matches, "std_error": res.std_error,
        "analytic_expected": res.analytic_expected, "relative_error": res.relative_error,
        "undefined": res.undefined,
    }
    try:
        doc["exact_expected"] = montecarlo.exact_expected_matches(config.n, config.m, config.p)
    except CapacityError:
        doc["exact_expected"] = None
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    _write(out / "simulate" / f"mc_n{config.n}_m{config.m}_p{config.p!r}.json", text)
    sys.stdout.write(text)


def _global_options(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--manifest", default=default(None), help="session manifest (JSON)")
    parser.add_argument("--out", default=default(None), help="output directory (default: manifest output_dir)")
    parser.add_argument("--seed", type=int, default=default(None), help="override the manifest seed")
    parser.add_argument("--threads", type=int, default=default(1), help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="authornet", description="Author-overlap relatedness of research areas.")
    _global_options(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", parents=[common], help="parse exports into canonical author lists")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("overlap", parents=[common], help="pairwise overlap matrix of a domain")
    p.add_argument("--domain", help="domain name (default: every domain)")
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("noise", parents=[common], help="homonymy noise floor from two unrelated domains")
    p.add_argument("--domain-a", required=True)
    p.add_argument("--domain-b", required=True)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("stats", parents=[common], help="signal-versus-noise statistics")
    p.add_argument("--domain", action="append", help="domain (repeat for a ratio between two)")
    p.add_argument("--noise-model", help="noise model JSON written by `noise`")
    p.add_argument("--summaries", help="JSON of precomputed summaries instead of manifest data")
    p.add_argument("--bins", type=int, default=0, help="also write within-domain histograms")
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("network", parents=[common], help="noise-corrected relatedness graph")
    p.add_argument("--domain", required=True)
    p.add_argument("--noise-model", required=True)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--noise-statistic", choices=("mean", "median"), default="mean")
    p.add_argument("--format", action="append", choices=network.EXPORT_FORMATS,
                   help="export format (repeatable; default: all)")
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of the expected-match formula")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--grid", help="JSON grid: {n: [...], m: [...], p: [...], trials | target_rel_stderr}")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None and args.command == "network":
        args.format = list(network.EXPORT_FORMATS)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (DomainError, CapacityError) as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except (FormatError, ConfigurationError, OSError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
