"""weldmon command line: generate, preprocess, cluster, label, rank, train, evaluate, stream.

Exit codes: 0 success, 1 usage error (bad flags/subcommand), 2 I/O, format,
or validation error, 3 reserved for stream runs that emitted error events.
Every subcommand accepts --config pointing at a JSON object of defaults;
explicit flags win over the file, and the effective configuration is echoed
to stderr for provenance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import evaluation, mlp, ranking, rbf, som, synthetic
from .dataset import from_feature_vectors, read_dataset_csv, write_dataset_csv
from .errors import EmptyInputError, InvalidArgumentError, WeldmonError
from .signal_processing import (
    PreprocessConfig,
    parse_source_id,
    preprocess_series,
    read_raw_series,
    write_raw_series,
)
from .streaming import StreamingDetector, event_to_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ERROR = 2
EXIT_EVENTS = 3

STREAM_CHUNK = 100_000

DEFAULTS: dict[str, dict] = {
    "generate": {
        "out_dir": "corpus",
        "profiles": None,
        "welders": 30,
        "trials": 3,
        "segments": 17,
        "segment_len": 100_000,
        "seed": 0,
    },
    "preprocess": {
        "in_dir": "corpus",
        "out": "dataset.csv",
        "window": 201,
        "segment_len": 100_000,
        "feature_dim": 50,
    },
    "cluster": {
        "data": "dataset.csv",
        "out": "som.json",
        "clusters": 9,
        "learning_rate": 0.3,
        "iterations": 500,
        "seed": 0,
    },
    "label": {
        "data": "dataset.csv",
        "model": "som.json",
        "out": "labeled.csv",
        "desirable_k": 2,
    },
    "rank": {"data": "labeled.csv", "out": "ranking.csv"},
    "train-mlp": {
        "data": "labeled.csv",
        "out": "mlp.json",
        "topology": "50-25-25-2",
        "iterations": 10_000,
        "learning_rate": 0.3,
        "learning_rate_decrement": 0.001,
        "split": 0.667,
        "split_mode": "ordered",
        "seed": 0,
    },
    "train-rbf": {
        "data": "labeled.csv",
        "out": "rbf.json",
        "centers": 95,
        "iterations": 10_000,
        "learning_rate": 0.3,
        "learning_rate_decrement": 0.001,
        "regularization": 0.3,
        "width_factor": 1.0,
        "split": 0.667,
        "split_mode": "ordered",
        "seed": 0,
    },
    "evaluate": {
        "model": "mlp.json",
        "data": "labeled.csv",
        "split": 0.667,
        "split_mode": "ordered",
        "seed": 0,
        "report": None,
    },
    "pipeline": {
        "out_dir": "runs",
        "corpus_dir": None,
        "welders": 30,
        "trials": 3,
        "segments": 17,
        "segment_len": 100_000,
        "window": 201,
        "feature_dim": 50,
        "clusters": 9,
        "desirable_k": 2,
        "iterations": 10_000,
        "split": 0.667,
        "split_mode": "ordered",
        "seed": 0,
    },
    "stream": {
        "model": "mlp.json",
        "input": "-",
        "events": None,
        "segment_len": 100_000,
        "window": 201,
        "feature_dim": 50,
    },
}


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _effective(args: argparse.Namespace) -> dict:
    """Defaults <- config file <- explicit flags; echoed to stderr."""
    cfg = dict(DEFAULTS[args.command])
    path = getattr(args, "config", None)
    if path:
        with open(path, encoding="utf-8") as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidArgumentError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(loaded, dict):
            raise InvalidArgumentError(f"{path}: config must be a JSON object")
        for key, value in loaded.items():
            dest = key.replace("-", "_")
            if dest not in cfg:
                raise InvalidArgumentError(
                    f"{path}: unknown config key {key!r} for command {args.command}"
                )
            cfg[dest] = value
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    print(f"# config {json.dumps(cfg, sort_keys=True)}", file=sys.stderr)
    return cfg


def _load_profiles(cfg: dict) -> list[synthetic.WelderProfile]:
    if cfg["profiles"]:
        with open(cfg["profiles"], encoding="utf-8") as fh:
            try:
                entries = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidArgumentError(f"{cfg['profiles']}: invalid JSON ({exc})") from exc
        if not isinstance(entries, list):
            raise InvalidArgumentError(f"{cfg['profiles']}: expected a JSON list of profiles")
        try:
            return [synthetic.WelderProfile(**entry) for entry in entries]
        except TypeError as exc:
            raise InvalidArgumentError(f"{cfg['profiles']}: bad profile entry ({exc})") from exc
    return synthetic.default_profiles(cfg["welders"], cfg["seed"])


def _parse_topology(text: str) -> list[int]:
    try:
        return [int(part) for part in str(text).split("-")]
    except ValueError as exc:
        raise InvalidArgumentError(f"bad topology {text!r}; expected e.g. 50-25-25-2") from exc


def load_classifier(path):
    """Load an mlp or rbf model file, dispatching on its format tag."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"{path}: invalid JSON ({exc})") from exc
    kind = doc.get("format")
    if kind == "weldmon-mlp":
        return mlp.load_mlp(path)
    if kind == "weldmon-rbf":
        return rbf.load_rbf(path)
    raise InvalidArgumentError(f"{path}: unrecognized model format {kind!r}")


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    out = Path(cfg["out_dir"])
    raw_dir = out / "raw"
    raw_dir.mkdir(parents=True, exist_ok=True)
    profiles = _load_profiles(cfg)
    rows = []
    n_series = 0
    for series, truth in synthetic.iter_corpus(
        profiles, cfg["trials"], cfg["segments"], cfg["segment_len"]
    ):
        welder_id, trial = parse_source_id(series.source_id)
        write_raw_series(raw_dir / f"{welder_id}_t{trial}.txt", series)
        labels = truth.labels()
        rows.extend((welder_id, trial, i, int(labels[i])) for i in range(labels.shape[0]))
        n_series += 1
    synthetic.write_ground_truth_csv(out / "ground_truth.csv", rows)
    print(
        f"welders={len(profiles)} trials={cfg['trials']} series={n_series} segments={len(rows)}"
    )
    return EXIT_OK


def cmd_preprocess(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    raw_dir = Path(cfg["in_dir"]) / "raw"
    files = sorted(raw_dir.glob("*.txt"))
    if not files:
        raise EmptyInputError(f"no raw series files under {raw_dir}")
    pre = PreprocessConfig(cfg["window"], cfg["segment_len"], cfg["feature_dim"])
    vectors = []
    for path in files:
        vectors.extend(preprocess_series(read_raw_series(path), pre))
    ds = from_feature_vectors(vectors)
    write_dataset_csv(cfg["out"], ds)
    print(f"series={len(files)} patterns={len(ds)}")
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    ds = read_dataset_csv(cfg["data"])
    config = som.SomConfig(
        n_clusters=cfg["clusters"],
        initial_learning_rate=cfg["learning_rate"],
        max_epochs=cfg["iterations"],
        seed=cfg["seed"],
    )
    model = som.train_som(ds, config)
    som.save_som(cfg["out"], model)
    counts = som.cluster_counts(model, ds)
    print(f"epochs={model.epochs_run} patterns={len(ds)}")
    print("cluster sizes: " + " ".join(str(int(c)) for c in counts))
    return EXIT_OK


def cmd_label(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    ds = read_dataset_csv(cfg["data"])
    model = som.load_som(cfg["model"])
    labeling = som.label_clusters(model, cfg["desirable_k"])
    labeled = som.label_dataset(model, labeling, ds)
    write_dataset_csv(cfg["out"], labeled)
    for c in range(model.weights.shape[0]):
        flag = "desirable" if labeling.desirable[c] else "undesirable"
        print(f"cluster {c}: weight_std={labeling.weight_std[c]:.6f} {flag}")
    labels = labeled.labels()
    print(f"patterns={len(labeled)} desirable={int(labels.sum())} "
          f"undesirable={int((1 - labels).sum())}")
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    labeled = read_dataset_csv(cfg["data"])
    scores = ranking.score_welders(labeled)
    ranking.write_ranking_csv(cfg["out"], scores)
    if ranking.uneven_pattern_counts(scores):
        print("warning: welders have unequal pattern counts; ranks compare raw counts",
              file=sys.stderr)
    print(ranking.format_ranking(scores))
    return EXIT_OK


def cmd_train_mlp(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    labeled = read_dataset_csv(cfg["data"])
    train, _ = evaluation.split_dataset(labeled, cfg["split"], cfg["split_mode"], cfg["seed"])
    topology = _parse_topology(cfg["topology"])
    config = mlp.MlpConfig(
        iterations=cfg["iterations"],
        initial_learning_rate=cfg["learning_rate"],
        learning_rate_decrement=cfg["learning_rate_decrement"],
        seed=cfg["seed"],
    )
    model = mlp.train_mlp(mlp.init_mlp(topology, cfg["seed"]), train, config)
    mlp.save_mlp(cfg["out"], model)
    print(
        f"trained {model.descriptor()}: patterns={len(train)} epochs={model.epochs_run} "
        f"loss={model.final_loss:.6e} time={model.train_time_s:.2f}s"
    )
    return EXIT_OK


def cmd_train_rbf(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    labeled = read_dataset_csv(cfg["data"])
    train, _ = evaluation.split_dataset(labeled, cfg["split"], cfg["split_mode"], cfg["seed"])
    config = rbf.RbfConfig(
        n_centers=cfg["centers"],
        iterations=cfg["iterations"],
        initial_learning_rate=cfg["learning_rate"],
        learning_rate_decrement=cfg["learning_rate_decrement"],
        regularization=cfg["regularization"],
        width_factor=cfg["width_factor"],
        seed=cfg["seed"],
    )
    model = rbf.train_rbf(train, config)
    rbf.save_rbf(cfg["out"], model)
    print(
        f"trained {model.descriptor()}: patterns={len(train)} epochs={model.epochs_run} "
        f"loss={model.final_loss:.6e} time={model.train_time_s:.2f}s"
    )
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    model = load_classifier(cfg["model"])
    labeled = read_dataset_csv(cfg["data"])
    _, test = evaluation.split_dataset(labeled, cfg["split"], cfg["split_mode"], cfg["seed"])
    predictor = mlp.predict_labels if isinstance(model, mlp.MlpModel) else rbf.predict_labels
    preds = predictor(model, test)
    report = evaluation.build_report(
        preds, test.labels(), model.descriptor(), model.train_time_s
    )
    print(evaluation.format_comparison([report]))
    if cfg["report"]:
        with open(cfg["report"], "w", encoding="utf-8") as fh:
            json.dump(evaluation.report_to_dict(report), fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _pipeline_corpus(cfg: dict, pre: PreprocessConfig):
    if cfg["corpus_dir"]:
        raw_dir = Path(cfg["corpus_dir"]) / "raw"
        files = sorted(raw_dir.glob("*.txt"))
        if not files:
            raise EmptyInputError(f"no raw series files under {raw_dir}")
        vectors = []
        for path in files:
            vectors.extend(preprocess_series(read_raw_series(path), pre))
        truth_path = Path(cfg["corpus_dir"]) / "ground_truth.csv"
        truth = None
        if truth_path.exists():
            table = synthetic.read_ground_truth_csv(truth_path)
            try:
                truth = np.array(
                    [
                        table[(fv.provenance.welder_id, fv.provenance.trial,
                               fv.provenance.segment_index)]
                        for fv in vectors
                    ],
                    dtype=np.int64,
                )
            except KeyError:
                truth = None
        return vectors, truth
    profiles = synthetic.default_profiles(cfg["welders"], cfg["seed"])
    return synthetic.generate_feature_corpus(
        profiles, cfg["trials"], cfg["segments"], cfg["segment_len"], pre
    )


def cmd_pipeline(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stage = "corpus"
    try:
        pre = PreprocessConfig(cfg["window"], cfg["segment_len"], cfg["feature_dim"])
        vectors, truth = _pipeline_corpus(cfg, pre)
        ds = from_feature_vectors(vectors)
        write_dataset_csv(out / "dataset.csv", ds)
        print(f"[corpus] patterns={len(ds)}")

        stage = "cluster"
        som_model = som.train_som(
            ds, som.SomConfig(n_clusters=cfg["clusters"], seed=cfg["seed"])
        )
        som.save_som(out / "som.json", som_model)
        print(f"[cluster] epochs={som_model.epochs_run}")

        stage = "label"
        labeling = som.label_clusters(som_model, cfg["desirable_k"])
        labeled = som.label_dataset(som_model, labeling, ds)
        write_dataset_csv(out / "labeled.csv", labeled)
        labels = labeled.labels()
        line = f"[label] desirable={int(labels.sum())} undesirable={int((1 - labels).sum())}"
        if truth is not None:
            agreement = float((labels == truth).mean())
            line += f" truth_agreement={agreement:.4f}"
        print(line)

        stage = "rank"
        scores = ranking.score_welders(labeled)
        ranking.write_ranking_csv(out / "ranking.csv", scores)
        print(f"[rank] best={scores[0].welder_id} worst={scores[-1].welder_id}")

        stage = "train"
        train, test = evaluation.split_dataset(
            labeled, cfg["split"], cfg["split_mode"], cfg["seed"]
        )
        dim = cfg["feature_dim"]
        reports = []
        for topology in ([dim, 35, 2], [dim, 25, 25, 2]):
            config = mlp.MlpConfig(iterations=cfg["iterations"], seed=cfg["seed"])
            model = mlp.train_mlp(mlp.init_mlp(topology, cfg["seed"]), train, config)
            mlp.save_mlp(out / f"mlp_{model.descriptor()}.json", model)
            preds = mlp.predict_labels(model, test)
            reports.append(
                evaluation.build_report(preds, test.labels(), model.descriptor(),
                                        model.train_time_s)
            )
            print(f"[train] mlp {model.descriptor()} epochs={model.epochs_run} "
                  f"time={model.train_time_s:.2f}s")
        for centers in (80, 95):
            n_centers = min(centers, len(train))
            if n_centers < centers:
                print(f"warning: reduced rbf centers {centers} -> {n_centers} "
                      f"(training set size)", file=sys.stderr)
            config = rbf.RbfConfig(
                n_centers=n_centers, iterations=cfg["iterations"], seed=cfg["seed"]
            )
            model = rbf.train_rbf(train, config)
            rbf.save_rbf(out / f"rbf_{model.descriptor()}.json", model)
            preds = rbf.predict_labels(model, test)
            reports.append(
                evaluation.build_report(preds, test.labels(), model.descriptor(),
                                        model.train_time_s)
            )
            print(f"[train] rbf {model.descriptor()} epochs={model.epochs_run} "
                  f"time={model.train_time_s:.2f}s")

        stage = "evaluate"
        ordered = evaluation.compare_models(reports)
        table = evaluation.format_comparison(ordered)
        (out / "comparison.txt").write_text(table + "\n", encoding="utf-8")
        with open(out / "comparison.json", "w", encoding="utf-8") as fh:
            json.dump([evaluation.report_to_dict(r) for r in ordered], fh, indent=2)
            fh.write("\n")
        print(table)
    except (WeldmonError, OSError, json.JSONDecodeError) as exc:
        print(f"weldmon: pipeline failed at stage {stage}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_stream(args: argparse.Namespace) -> int:
    cfg = _effective(args)
    model = load_classifier(cfg["model"])
    pre = PreprocessConfig(cfg["window"], cfg["segment_len"], cfg["feature_dim"])
    detector = StreamingDetector(model, pre)
    events_fh = None
    close_events = False
    if cfg["events"]:
        events_fh = open(cfg["events"], "w", encoding="utf-8", newline="\n")
        close_events = True
    else:
        events_fh = sys.stdout

    def emit(new_events):
        for event in new_events:
            events_fh.write(json.dumps(event_to_dict(event)) + "\n")
        if new_events:
            events_fh.flush()

    source = sys.stdin if cfg["input"] == "-" else open(cfg["input"], encoding="utf-8")
    try:
        chunk: list[float] = []
        for line in source:
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                chunk.append(float(text))
            except ValueError:
                # malformed sample: poison the containing segment, keep going
                chunk.append(float("nan"))
            if len(chunk) >= STREAM_CHUNK:
                _, new_events = detector.push_samples(chunk)
                emit(new_events)
                chunk.clear()
        if chunk:
            _, new_events = detector.push_samples(chunk)
            emit(new_events)
        dropped = detector.flush()
    finally:
        if source is not sys.stdin:
            source.close()
        if close_events:
            events_fh.close()
    print(
        f"segments={detector.segments_emitted} events={len(detector.events)} "
        f"discarded={dropped}",
        file=sys.stderr,
    )
    return EXIT_EVENTS if detector.events else EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="weldmon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--config", help="JSON file of defaults for this command")
        return p

    p = add("generate", cmd_generate, "write a synthetic labeled corpus")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--profiles", help="JSON list of welder profiles")
    p.add_argument("--welders", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--segments", type=int)
    p.add_argument("--segment-len", dest="segment_len", type=int)
    p.add_argument("--seed", type=int)

    p = add("preprocess", cmd_preprocess, "reduce raw series to feature vectors")
    p.add_argument("--in-dir", dest="in_dir")
    p.add_argument("--out")
    p.add_argument("--window", type=int)
    p.add_argument("--segment-len", dest="segment_len", type=int)
    p.add_argument("--feature-dim", dest="feature_dim", type=int)

    p = add("cluster", cmd_cluster, "train the self-organizing map")
    p.add_argument("--data")
    p.add_argument("--out")
    p.add_argument("--clusters", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--iterations", type=int, help="maximum training epochs")
    p.add_argument("--seed", type=int)

    p = add("label", cmd_label, "label patterns from the trained map")
    p.add_argument("--data")
    p.add_argument("--model")
    p.add_argument("--out")
    p.add_argument("--desirable-k", dest="desirable_k", type=int)

    p = add("rank", cmd_rank, "rank welders by undesirable-pattern count")
    p.add_argument("--data")
    p.add_argument("--out")

    p = add("train-mlp", cmd_train_mlp, "train a perceptron classifier")
    p.add_argument("--data")
    p.add_argument("--out")
    p.add_argument("--topology")
    p.add_argument("--iterations", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--split", type=float)
    p.add_argument("--split-mode", dest="split_mode", choices=("ordered", "shuffled"))
    p.add_argument("--seed", type=int)

    p = add("train-rbf", cmd_train_rbf, "train a radial basis classifier")
    p.add_argument("--data")
    p.add_argument("--out")
    p.add_argument("--centers", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--regularization", type=float)
    p.add_argument("--split", type=float)
    p.add_argument("--split-mode", dest="split_mode", choices=("ordered", "shuffled"))
    p.add_argument("--seed", type=int)

    p = add("evaluate", cmd_evaluate, "score a trained model on the held-out part")
    p.add_argument("--model")
    p.add_argument("--data")
    p.add_argument("--split", type=float)
    p.add_argument("--split-mode", dest="split_mode", choices=("ordered", "shuffled"))
    p.add_argument("--seed", type=int)
    p.add_argument("--report", help="write the report as JSON here")

    p = add("pipeline", cmd_pipeline, "run the whole workflow end to end")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--corpus-dir", dest="corpus_dir",
                   help="reuse an existing corpus instead of generating one")
    p.add_argument("--welders", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--segments", type=int)
    p.add_argument("--segment-len", dest="segment_len", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--feature-dim", dest="feature_dim", type=int)
    p.add_argument("--clusters", type=int)
    p.add_argument("--desirable-k", dest="desirable_k", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--split", type=float)
    p.add_argument("--split-mode", dest="split_mode", choices=("ordered", "shuffled"))
    p.add_argument("--seed", type=int)

    p = add("stream", cmd_stream, "classify a live sample feed segment by segment")
    p.add_argument("--model")
    p.add_argument("--input", help="sample file, or - for stdin")
    p.add_argument("--events", help="write error events (JSON lines) here instead of stdout")
    p.add_argument("--segment-len", dest="segment_len", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--feature-dim", dest="feature_dim", type=int)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WeldmonError, OSError, json.JSONDecodeError) as exc:
        print(f"weldmon: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
