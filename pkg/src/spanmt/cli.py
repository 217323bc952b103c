"""Command-line entry points.

Subcommands: import, translate, backtranslate, stats, export-rc,
review serve, review report. Exit codes: 0 success, 1 runtime failure,
2 usage error (bad flags, missing files, invalid config).
"""

from __future__ import annotations

import argparse
import configparser
import json
import random
import sys
from pathlib import Path

from .backends import (SUPPORTED_LANGUAGES, BackendError, IdentityBackend,
                       MockBackend, MockBehavior, RemoteBackend, RemoteConfig)
from .corpus import (CorpusError, FieldMapping, ParseError,
                     import_token_indexed, load_corpus, save_corpus)
from .markup import DecodeError
from .metrics import (MetricError, corpus_stats, format_domain_counts,
                      format_review_aggregates, format_transfer_reports,
                      review_aggregate, stats_totals)
from .pipeline import (MarkerConfig, back_translate, export_rc_instances,
                       translate_corpus, write_rc_instances)
from .postprocess import PostprocessError, PunctuationPolicy
from .review import (JudgmentLog, ReviewError, build_sample, load_sample,
                     save_sample, serve)

USAGE_EXIT = 2
RUNTIME_EXIT = 1


class UsageError(Exception):
    """Bad invocation: unknown flags, missing files, invalid config."""


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p


# --------------------------------------------------------------------------
# Config file
# --------------------------------------------------------------------------

def _read_config(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path is not None:
        _require_file(path)
        try:
            cp.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise UsageError(f"invalid config {path}: {exc}") from exc
    return cp


def _policy_from(cp: configparser.ConfigParser) -> PunctuationPolicy:
    if not cp.has_section("policy"):
        return PunctuationPolicy.default()
    try:
        if cp.has_option("policy", "file"):
            return PunctuationPolicy.from_config_file(_require_file(cp.get("policy", "file")))
        extra = cp.get("policy", "extra_punctuation", fallback="")
        return PunctuationPolicy.with_extra(extra) if extra else PunctuationPolicy.default()
    except (ValueError, PostprocessError) as exc:
        raise UsageError(f"invalid [policy] config: {exc}") from exc


def _markers_from(cp: configparser.ConfigParser, typed: bool) -> MarkerConfig:
    kwargs = {"include_entity_type": typed}
    if cp.has_section("markers"):
        for key in ("e1_start", "e1_end", "e2_start", "e2_end"):
            if cp.has_option("markers", key):
                kwargs[key] = cp.get("markers", key)
        if cp.has_option("markers", "include_entity_type"):
            kwargs["include_entity_type"] = (
                cp.getboolean("markers", "include_entity_type") or typed)
    try:
        return MarkerConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(f"invalid [markers] config: {exc}") from exc


def _backend_from(name: str | None, cp: configparser.ConfigParser,
                  mock_behavior: str | None, seed: int):
    name = name or cp.get("backend", "name", fallback="identity")
    if name == "identity":
        return IdentityBackend()
    if name == "mock":
        behavior_path = mock_behavior or cp.get("backend", "behavior", fallback=None)
        try:
            behavior = (MockBehavior.from_json_file(_require_file(behavior_path))
                        if behavior_path else MockBehavior(seed=seed))
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"invalid mock behavior file: {exc}") from exc
        return MockBackend(behavior)
    if name == "remote":
        if not cp.has_option("backend", "endpoint"):
            raise UsageError("remote backend requires [backend] endpoint in --config")
        try:
            config = RemoteConfig(
                endpoint=cp.get("backend", "endpoint"),
                credential_env=cp.get("backend", "credential_env",
                                      fallback="SPANMT_API_KEY"),
                max_batch_size=cp.getint("backend", "max_batch_size", fallback=50),
                retry_limit=cp.getint("backend", "retry_limit", fallback=3),
                backoff_base=cp.getfloat("backend", "backoff_base", fallback=0.5),
                requests_per_second=cp.getfloat("backend", "requests_per_second",
                                                fallback=None),
            )
        except (ValueError, configparser.Error) as exc:
            raise UsageError(f"invalid [backend] config: {exc}") from exc
        return RemoteBackend(config, rng=random.Random(seed))
    raise UsageError(f"unknown backend {name!r} (expected identity, mock, or remote)")


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def _cmd_import(args) -> int:
    path = _require_file(args.infile)
    if args.mapping:
        try:
            mapping = FieldMapping.from_json_file(_require_file(args.mapping))
        except (ParseError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad field mapping {args.mapping}: {exc}") from exc
    else:
        mapping = FieldMapping()
    with open(path, encoding="utf-8") as fh:
        corpus = import_token_indexed(fh, mapping, language=args.language,
                                      domain=args.domain, split=args.split)
    save_corpus(corpus, args.out)
    print(f"imported {len(corpus.sentences)} sentences -> {args.out}")
    return 0


def _translate_common(args, reverse: bool) -> int:
    cp = _read_config(args.config)
    policy = _policy_from(cp)
    target = args.original if reverse else args.target
    if target not in SUPPORTED_LANGUAGES:
        raise UsageError(f"unsupported language tag {target!r}")
    backend = _backend_from(args.backend, cp, args.mock_behavior, args.seed)
    corpus = load_corpus(_require_file(args.infile), language=args.language,
                         domain=args.domain, split=args.split)
    if reverse:
        out_corpus, report, manifest = back_translate(corpus, backend, args.original, policy)
    else:
        out_corpus, report, manifest = translate_corpus(corpus, backend, args.target, policy)
    save_corpus(out_corpus, args.out)
    manifest_path = args.manifest or f"{args.out}.manifest.json"
    Path(manifest_path).write_text(manifest.to_json(), encoding="utf-8")
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    print(format_transfer_reports([report]), end="")
    return 0


def _cmd_translate(args) -> int:
    return _translate_common(args, reverse=False)


def _cmd_backtranslate(args) -> int:
    return _translate_common(args, reverse=True)


def _cmd_stats(args) -> int:
    corpora = [load_corpus(_require_file(p)) for p in args.infiles]
    counts = corpus_stats(corpora)
    if args.json:
        sentences, relations = stats_totals(counts)
        doc = {"rows": [{"domain": c.domain, "split": c.split,
                         "sentences": c.sentence_count, "relations": c.relation_count}
                        for c in counts],
               "totals": {"sentences": sentences, "relations": relations}}
        print(json.dumps(doc, indent=2))
    else:
        print(format_domain_counts(counts), end="")
    return 0


def _cmd_export_rc(args) -> int:
    cp = _read_config(args.config)
    config = _markers_from(cp, args.typed_markers)
    corpus = load_corpus(_require_file(args.infile), language=args.language,
                         domain=args.domain, split=args.split)
    instances = export_rc_instances(corpus, config)
    if args.out:
        n = write_rc_instances(instances, args.out)
    else:
        n = 0
        for inst in instances:
            print(json.dumps(inst.to_dict(), ensure_ascii=False, separators=(",", ":")))
            n += 1
    print(f"exported {n} instances", file=sys.stderr)
    return 0


def _load_tasks_for(args):
    if args.tasks:
        return load_sample(_require_file(args.tasks))
    if not (args.source and args.translated):
        raise UsageError("provide --tasks, or --source and --translated to sample")
    source = load_corpus(_require_file(args.source))
    translated = load_corpus(_require_file(args.translated))
    tasks = build_sample(source, translated, n=args.n, seed=args.seed)
    if getattr(args, "save_tasks", None):
        save_sample(tasks, args.save_tasks, seed=args.seed, n=args.n)
    return tasks


def _cmd_review_serve(args) -> int:
    tasks = _load_tasks_for(args)
    serve(tasks, args.log, bind_address=args.bind, static_dir=args.static)
    return 0


def _cmd_review_report(args) -> int:
    tasks = {t.task_id: t for t in load_sample(_require_file(args.tasks))}
    judgments = JudgmentLog(_require_file(args.log)).replay()
    aggregates = review_aggregate(judgments, tasks)
    if args.lang:
        aggregates = {k: v for k, v in aggregates.items() if k == args.lang}
    if args.json:
        print(json.dumps({k: v.to_dict() for k, v in sorted(aggregates.items())}, indent=2))
    else:
        print(format_review_aggregates(aggregates[k] for k in sorted(aggregates)), end="")
    return 0


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def _add_metadata_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--language", help="corpus language tag (overrides sidecar/filename)")
    p.add_argument("--domain", help="corpus domain (overrides sidecar/filename)")
    p.add_argument("--split", help="corpus split (overrides sidecar/filename)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spanmt",
        description="Project entity and relation annotations through translation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import", help="convert token-indexed records to corpus JSONL")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--language", required=True)
    p.add_argument("--domain", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--mapping", help="JSON file overriding source field names")
    p.set_defaults(func=_cmd_import)

    for name, reverse in (("translate", False), ("backtranslate", True)):
        p = sub.add_parser(name, help=f"{name} a corpus and report transfer statistics")
        p.add_argument("--in", dest="infile", required=True)
        if reverse:
            p.add_argument("--original", required=True,
                           help="language to translate back into")
        else:
            p.add_argument("--target", required=True, help="target language tag")
        p.add_argument("--out", required=True)
        p.add_argument("--backend", choices=["identity", "mock", "remote"])
        p.add_argument("--report", help="write TransferReport JSON here")
        p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
        p.add_argument("--config", help="INI file naming backend, policy, markers")
        p.add_argument("--mock-behavior", help="JSON file scripting the mock backend")
        p.add_argument("--seed", type=int, default=0)
        _add_metadata_flags(p)
        p.set_defaults(func=_cmd_backtranslate if reverse else _cmd_translate)

    p = sub.add_parser("stats", help="sentence/relation counts per domain and split")
    p.add_argument("--in", dest="infiles", required=True, nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("export-rc", help="emit one marked instance per relation")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", help="output JSONL (default: stdout)")
    p.add_argument("--typed-markers", action="store_true",
                   help="carry entity types in the markers")
    p.add_argument("--config", help="INI file overriding marker templates")
    _add_metadata_flags(p)
    p.set_defaults(func=_cmd_export_rc)

    p = sub.add_parser("review", help="human verification workflow")
    rsub = p.add_subparsers(dest="review_command", required=True)

    p = rsub.add_parser("serve", help="serve review tasks and collect judgments")
    p.add_argument("--tasks", help="task file produced by a previous --save-tasks")
    p.add_argument("--source", help="source corpus JSONL (to sample)")
    p.add_argument("--translated", help="translated corpus JSONL (to sample)")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save-tasks", help="persist the sampled tasks here")
    p.add_argument("--log", required=True, help="append-only judgment JSONL")
    p.add_argument("--bind", default="127.0.0.1:8571")
    p.add_argument("--static", help="directory of built frontend assets")
    p.set_defaults(func=_cmd_review_serve)

    p = rsub.add_parser("report", help="aggregate judgments, one row per language")
    p.add_argument("--tasks", required=True)
    p.add_argument("--log", required=True)
    p.add_argument("--lang")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_review_report)

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (CorpusError, BackendError, DecodeError, PostprocessError,
            MetricError, ReviewError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


def entry() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    entry()
