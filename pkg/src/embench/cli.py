"""Pipeline command line: generate, train, evaluate, report.

One TOML config file drives every stage; flags override config keys, and the
EMBENCH_SEED environment variable overrides the config's global seed (flags
beat both). Every stage writes a manifest of its artifacts with content
hashes, so identical configs are checkable for identical outputs. Stages keep
completed artifacts when a later step fails and exit nonzero.
"""

import argparse
import hashlib
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .corpus import (
    GeneratorConfig,
    corpus_fingerprint,
    corpus_stats,
    format_corpus_stats,
    generate_corpus,
    load_corpus,
    save_corpus,
)
from .downstream import ClassifierConfig, build_task, train_classifier
from .demographics import load_demographics
from .embeddings import load_embeddings, nearest_neighbours, save_embeddings
from .hitrate import hit_rate_curve
from .pairs import load_pairlist, save_pairlist
from .projection import TsneConfig, save_projection, tsne
from .reliability import sample_size_sweep
from .trainers import CONFIG_TYPES, METHODS, make_trainer, run_trainer

ENV_SEED = "EMBENCH_SEED"
NEIGHBOUR_TABLE_SIZE = 10

HIT_RATE_HEADER = "method,source,relation,L,hit_rate,n_evaluable"
NEIGHBOURS_HEADER = "method,query,rank,code,cosine"
DOWNSTREAM_HEADER = "task,target_code,disease_emb,demo_emb,ap,f1,n_test,prevalence,seed"
RELIABILITY_HEADER = "method,sample_fraction,n_runs,n_pairs,sigma"


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _resolve_seed(args, config: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(ENV_SEED)
    if env is not None:
        return int(env)
    return int(config.get("run", {}).get("seed", 0))


def _output_dir(args, config: dict) -> str:
    out = args.output_dir or config.get("run", {}).get("output_dir", "out")
    os.makedirs(out, exist_ok=True)
    return out


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(out_dir: str, stage: str, names: list[str]) -> str:
    lines = [f"{_sha256(os.path.join(out_dir, name))}  {name}" for name in sorted(names)]
    path = os.path.join(out_dir, f"manifest_{stage}.txt")
    with open(path, "wb") as fh:
        fh.write(("".join(line + "\n" for line in lines)).encode("utf-8"))
    return path


def _write_csv(path: str, header: str, rows: list[str]) -> None:
    with open(path, "wb") as fh:
        fh.write(("".join(line + "\n" for line in [header] + rows)).encode("utf-8"))


def _trainer_config(method: str, config: dict, seed: int):
    overrides = dict(config.get("train", {}).get(method.lower(), {}))
    overrides.setdefault("seed", seed)
    fields = CONFIG_TYPES[method].__dataclass_fields__
    unknown = set(overrides) - set(fields)
    if unknown:
        raise ValueError(f"unknown {method} config keys: {sorted(unknown)}")
    for key in ("layer_sizes", "time_buckets", "demo_dims"):
        if key in overrides and isinstance(overrides[key], list):
            overrides[key] = tuple(overrides[key])
    return CONFIG_TYPES[method](**overrides)


def _corpus_path(args, config: dict, out_dir: str) -> str:
    path = getattr(args, "corpus", None) or config.get("corpus", {}).get("path")
    return path or os.path.join(out_dir, "corpus.jsonl")


def _load_corpus_for(args, config: dict, out_dir: str):
    path = _corpus_path(args, config, out_dir)
    if not os.path.exists(path):
        raise FileNotFoundError(f"missing corpus file {path!r}; run `generate` or set corpus.path")
    min_visits = getattr(args, "min_visits", None)
    if min_visits is None:
        min_visits = int(config.get("corpus", {}).get("min_visits", 5))
    return load_corpus(path, min_visits=min_visits)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    config = _load_config(args.config)
    out_dir = _output_dir(args, config)
    seed = _resolve_seed(args, config)
    overrides = dict(config.get("generator", {}))
    overrides.setdefault("seed", seed)
    unknown = set(overrides) - set(GeneratorConfig.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown generator config keys: {sorted(unknown)}")
    gcfg = GeneratorConfig(**overrides)

    corpus, pairs = generate_corpus(gcfg)
    save_corpus(corpus, os.path.join(out_dir, "corpus.jsonl"))
    save_pairlist(pairs, os.path.join(out_dir, "planted_pairs.csv"))
    stats_text = format_corpus_stats(corpus_stats(corpus))
    with open(os.path.join(out_dir, "stats.txt"), "wb") as fh:
        fh.write(stats_text.encode("utf-8"))
    _write_manifest(out_dir, "generate", ["corpus.jsonl", "planted_pairs.csv", "stats.txt"])
    print(stats_text, end="")
    print(f"fingerprint {corpus_fingerprint(corpus)}")
    return 0


def _train_one(method: str, corpus_path: str, min_visits: int, cfg):
    corpus = load_corpus(corpus_path, min_visits=min_visits)
    return run_trainer(method, corpus, cfg)


def cmd_train(args) -> int:
    config = _load_config(args.config)
    out_dir = _output_dir(args, config)
    seed = _resolve_seed(args, config)
    methods = args.methods or config.get("train", {}).get("methods") or list(METHODS)
    methods = [m.upper() for m in methods]
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    jobs = args.jobs or int(config.get("run", {}).get("jobs", 1))

    corpus_path = _corpus_path(args, config, out_dir)
    if not os.path.exists(corpus_path):
        raise FileNotFoundError(f"missing corpus file {corpus_path!r}; run `generate` first")
    min_visits = args.min_visits if args.min_visits is not None else int(
        config.get("corpus", {}).get("min_visits", 5)
    )
    configs = {m: _trainer_config(m, config, seed) for m in methods}

    outputs: dict = {}
    failures: dict = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                m: pool.submit(_train_one, m, corpus_path, min_visits, configs[m]) for m in methods
            }
            for m in methods:
                try:
                    outputs[m] = futures[m].result()
                except Exception as exc:
                    failures[m] = exc
    else:
        corpus = load_corpus(corpus_path, min_visits=min_visits)
        for m in methods:
            try:
                outputs[m] = run_trainer(m, corpus, configs[m])
            except Exception as exc:
                failures[m] = exc

    artifacts = []
    for m in methods:  # fixed write order keeps reruns byte-identical
        if m not in outputs:
            continue
        result = outputs[m]
        stem = f"{m}.{configs[m].seed}"
        save_embeddings(result.embeddings, os.path.join(out_dir, f"{stem}.emb"))
        artifacts.append(f"{stem}.emb")
        if result.demographics is not None:
            from .demographics import save_demographics

            save_demographics(result.demographics, os.path.join(out_dir, f"{stem}.demo.json"))
            artifacts.append(f"{stem}.demo.json")
        rows = [f"{i},{loss!r}" for i, loss in enumerate(result.loss_history, start=1)]
        _write_csv(os.path.join(out_dir, f"{stem}.losses.csv"), "epoch,loss", rows)
        artifacts.append(f"{stem}.losses.csv")
        print(f"trained {m} -> {stem}.emb ({result.embeddings.dim} dims)")

    _write_manifest(out_dir, "train", artifacts)
    for m, exc in failures.items():
        print(f"error: {m} failed: {exc}", file=sys.stderr)
    return 1 if failures else 0


def _load_method_embeddings(out_dir: str, methods, seed: int, config: dict) -> dict:
    loaded = {}
    for m in methods:
        cfg = _trainer_config(m, config, seed)
        path = os.path.join(out_dir, f"{m}.{cfg.seed}.emb")
        if not os.path.exists(path):
            raise FileNotFoundError(f"missing embedding file {path!r}; run `train` first")
        loaded[m] = load_embeddings(path)
    return loaded


def _eval_neighbours(out_dir, embeddings, probes) -> list[str]:
    rows = []
    for m in sorted(embeddings):
        emb = embeddings[m]
        for probe in probes:
            hood = nearest_neighbours(emb, probe, NEIGHBOUR_TABLE_SIZE)
            rows += [
                f"{m},{probe},{rank},{code},{value!r}"
                for rank, (code, value) in enumerate(hood, start=1)
            ]
    _write_csv(os.path.join(out_dir, "neighbours.csv"), NEIGHBOURS_HEADER, rows)
    return ["neighbours.csv"]


def _eval_hit_rate(out_dir, embeddings, pair_paths, l_min, l_max) -> list[str]:
    rows = []
    for path in pair_paths:
        if not os.path.exists(path):
            raise FileNotFoundError(f"missing pair list {path!r}")
        pairs = load_pairlist(path)
        for m in sorted(embeddings):
            for source, relation in sorted(pairs.groups()):
                group = pairs.subset(source, relation)
                curve = hit_rate_curve(embeddings[m], group, l_min, l_max)
                rows += [
                    f"{m},{source},{relation},{L},{rate!r},{n}"
                    for L, rate, n in curve.points
                ]
    _write_csv(os.path.join(out_dir, "hit_rate.csv"), HIT_RATE_HEADER, rows)
    return ["hit_rate.csv"]


def _eval_tsne(out_dir, embeddings, methods, tsne_conf: dict, seed: int) -> list[str]:
    overrides = dict(tsne_conf)
    overrides.setdefault("seed", seed)
    unknown = set(overrides) - set(TsneConfig.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown tsne config keys: {sorted(unknown)}")
    cfg = TsneConfig(**overrides)
    written = []
    for m in methods:
        proj = tsne(embeddings[m], cfg)
        name = f"tsne.{m}.csv"
        save_projection(proj, os.path.join(out_dir, name))
        written.append(name)
    return written


def _eval_downstream(out_dir, corpus, embeddings, conf: dict, seed: int) -> list[str]:
    targets = conf.get("targets")
    if not targets:
        raise ValueError("downstream evaluation requires evaluate.downstream.targets")
    horizon = int(conf.get("horizon_days", 183))
    overrides = {
        k: v
        for k, v in conf.items()
        if k in ClassifierConfig.__dataclass_fields__
    }
    overrides.setdefault("seed", seed)
    for key in ("layer_sizes", "demo_dims", "split"):
        if key in overrides and isinstance(overrides[key], list):
            overrides[key] = tuple(overrides[key])
    cfg = ClassifierConfig(**overrides)

    disease_methods = [m.upper() for m in conf.get("disease_methods", sorted(embeddings))]
    demo_methods = [m.upper() for m in conf.get("demo_methods", [])]
    include_random = bool(conf.get("include_random", True))

    demo_tables = {}
    for m in demo_methods:
        path = os.path.join(out_dir, f"{m}.{cfg.seed}.demo.json")
        if not os.path.exists(path):
            raise FileNotFoundError(f"missing demographic file {path!r}; train {m} first")
        demo_tables[m] = load_demographics(path)

    rows = []
    for target in targets:
        task = build_task(corpus, target, horizon)
        task_label = f"onset_{horizon}d"
        runs = []
        if include_random:
            runs.append((None, None, "random"))
        for dm in disease_methods:
            if dm not in embeddings:
                raise ValueError(f"downstream disease method {dm!r} has no loaded embeddings")
            if demo_methods:
                runs += [(dm, demo, demo) for demo in demo_methods]
            else:
                runs.append((dm, None, "random"))
        for dm, demo_m, demo_label in runs:
            report = train_classifier(
                task,
                cfg,
                disease_embeddings=embeddings[dm] if dm else None,
                demo_embeddings=demo_tables[demo_m] if demo_m else None,
                demo_label=demo_label,
            )
            rows.append(
                f"{task_label},{target},{report.disease_emb},{report.demo_emb},"
                f"{report.average_precision!r},{report.f1!r},{report.n_test},"
                f"{report.prevalence!r},{report.seed}"
            )
    _write_csv(os.path.join(out_dir, "downstream.csv"), DOWNSTREAM_HEADER, rows)
    return ["downstream.csv"]


def _eval_reliability(out_dir, corpus, conf: dict, config: dict, seed: int) -> list[str]:
    methods = [m.upper() for m in conf.get("methods", [])]
    if not methods:
        raise ValueError("reliability evaluation requires evaluate.reliability.methods")
    fractions = conf.get("fractions", [0.2, 0.4, 0.6, 0.8, 1.0])
    n_runs = int(conf.get("n_runs", 10))
    max_pairs = conf.get("max_pairs")
    rows = []
    for m in methods:
        trainer = make_trainer(m, _trainer_config(m, config, seed))
        reports = sample_size_sweep(
            trainer,
            corpus,
            fractions=fractions,
            n_runs=n_runs,
            base_seed=seed,
            max_pairs=int(max_pairs) if max_pairs else None,
            method=m,
        )
        rows += [
            f"{m},{r.sample_fraction!r},{r.n_runs},{r.n_pairs},{r.sigma!r}" for r in reports
        ]
    _write_csv(os.path.join(out_dir, "reliability.csv"), RELIABILITY_HEADER, rows)
    return ["reliability.csv"]


def cmd_evaluate(args) -> int:
    config = _load_config(args.config)
    out_dir = _output_dir(args, config)
    seed = _resolve_seed(args, config)
    ev = config.get("evaluate", {})
    methods = [m.upper() for m in ev.get("methods") or config.get("train", {}).get("methods") or []]
    if not methods:
        raise ValueError("no methods to evaluate; set evaluate.methods or train.methods")
    embeddings = _load_method_embeddings(out_dir, methods, seed, config)

    corpus = None
    if ev.get("downstream") or ev.get("reliability"):
        corpus = _load_corpus_for(args, config, out_dir)

    artifacts: list[str] = []
    failures: list[str] = []

    def _stage(name, fn):
        try:
            artifacts.extend(fn())
        except Exception as exc:
            failures.append(f"{name}: {exc}")

    probes = ev.get("neighbours", [])
    if probes:
        _stage("neighbours", lambda: _eval_neighbours(out_dir, embeddings, probes))

    if ev.get("hit_rate", False):
        pair_paths = ev.get("pairs") or [os.path.join(out_dir, "planted_pairs.csv")]
        l_min = int(ev.get("l_min", 3))
        l_max = int(ev.get("l_max", 20))
        _stage("hit_rate", lambda: _eval_hit_rate(out_dir, embeddings, pair_paths, l_min, l_max))

    tsne_methods = [m.upper() for m in ev.get("tsne", [])]
    if tsne_methods:
        for m in tsne_methods:
            if m not in embeddings:
                raise ValueError(f"tsne method {m!r} has no loaded embeddings")
        _stage(
            "tsne",
            lambda: _eval_tsne(out_dir, embeddings, tsne_methods, ev.get("tsne_config", {}), seed),
        )

    if ev.get("downstream"):
        _stage(
            "downstream",
            lambda: _eval_downstream(out_dir, corpus, embeddings, ev["downstream"], seed),
        )

    if ev.get("reliability"):
        _stage(
            "reliability",
            lambda: _eval_reliability(out_dir, corpus, ev["reliability"], config, seed),
        )

    _write_manifest(out_dir, "evaluate", artifacts)
    for failure in failures:
        print(f"error: {failure}", file=sys.stderr)
    if not artifacts and not failures:
        print("nothing to evaluate: enable at least one evaluation in the config", file=sys.stderr)
        return 1
    return 1 if failures else 0


REPORT_FILES = (
    "stats.txt",
    "hit_rate.csv",
    "neighbours.csv",
    "downstream.csv",
    "reliability.csv",
)


def cmd_report(args) -> int:
    config = _load_config(args.config)
    out_dir = _output_dir(args, config)
    names = [n for n in REPORT_FILES if os.path.exists(os.path.join(out_dir, n))]
    names += sorted(
        n for n in os.listdir(out_dir) if n.startswith("tsne.") and n.endswith(".csv")
    )
    if not names:
        raise FileNotFoundError(f"no report inputs found in {out_dir!r}; run the pipeline first")
    blocks = []
    for name in names:
        with open(os.path.join(out_dir, name), encoding="utf-8") as fh:
            blocks.append(f"# file: {name}\n{fh.read()}")
    with open(os.path.join(out_dir, "summary.csv"), "wb") as fh:
        fh.write("\n".join(blocks).encode("utf-8"))
    _write_manifest(out_dir, "report", ["summary.csv"])
    print(f"merged {len(names)} reports into summary.csv")
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embench",
        description="Train and benchmark disease-concept embeddings on visit sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--output-dir", help="artifact directory (default: out)")
        p.add_argument("--seed", type=int, help="global seed (overrides config and EMBENCH_SEED)")

    p_gen = sub.add_parser("generate", help="generate a synthetic corpus with planted pairs")
    common(p_gen)
    p_gen.set_defaults(fn=cmd_generate)

    p_train = sub.add_parser("train", help="train embedding methods on a corpus")
    common(p_train)
    p_train.add_argument("--methods", nargs="+", metavar="METHOD", help=", ".join(METHODS))
    p_train.add_argument("--corpus", help="corpus path (default: <output-dir>/corpus.jsonl)")
    p_train.add_argument("--min-visits", type=int, help="minimum visits per patient at load")
    p_train.add_argument("--jobs", type=int, help="parallel trainer processes")
    p_train.set_defaults(fn=cmd_train)

    p_eval = sub.add_parser("evaluate", help="run the configured evaluations")
    common(p_eval)
    p_eval.add_argument("--corpus", help="corpus path (default: <output-dir>/corpus.jsonl)")
    p_eval.add_argument("--min-visits", type=int, help="minimum visits per patient at load")
    p_eval.add_argument("--jobs", type=int, help="unused reservation for parallel evaluation")
    p_eval.set_defaults(fn=cmd_evaluate)

    p_rep = sub.add_parser("report", help="merge all report files into summary.csv")
    common(p_rep)
    p_rep.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        raise
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
