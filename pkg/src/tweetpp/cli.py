"""Command-line driver: featurize, train, evaluate, sweep, fixtures, generate.

Stages hand off through files under ``output_dir``::

    split.json                      train/test tweet ids
    features/<preset>/vocab.json    frozen vocabulary
    features/<preset>/vectors.jsonl one sparse vector per tweet
    models/<preset>/ensemble.json   RAkEL members
    models/<preset>/baselines.json  KNN and SVM baselines
    train_log.json                  labelsets and seeds per preset
    report.json, report.txt         comparison grid
    repair_audit.jsonl              one line per repaired prediction
    sweep.json, sweep.csv           (K, loss) series per strategy

Exit codes: 0 success, 1 invalid configuration or input, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import fixtures
from .corpus import Dataset, DatasetError, load_dataset, save_dataset, split
from .evaluation import (
    METHODS,
    Baselines,
    EvalReport,
    PresetData,
    evaluate_preset,
    sweep_from_predictions,
    train_baselines,
)
from .features import PRESETS, Csr, FeatureVector, Vocabulary
from .learners import SvmHyper, SvmLearner
from .postprocess import SCOPES, STRATEGIES, PostprocessConfig, TrainingNeighbors
from .rakel import EnsembleConfig, load_ensemble, save_ensemble, train_ensemble
from .seeds import derive_seed

log = logging.getLogger("tweetpp")

DEFAULT_CONFIG = {
    "dataset": None,
    "output_dir": "runs/default",
    "seed": 0,
    "split": {"train_size": 600, "seed": None},
    "features": {"presets": ["f1", "f2", "f3", "f4", "f5"], "joint_counting": False, "min_words": 0},
    "ensemble": {"k": 3, "m": 10, "epsilon": 0.5, "seed": None, "coverage_check": True},
    "postprocess": {"strategy": "wsum", "K": 10, "scope": "violated_groups_only"},
    "svm": {"lam": 1e-4, "epochs": 50},
    "baselines": {"enabled": True, "knn_K": 10},
    "methods": list(METHODS),
    "sweep": {"preset": "f5", "strategies": ["sum", "wsum"], "k_values": list(range(2, 31, 2)), "plot": False},
    "extras": False,
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in out:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(out[key], dict) and isinstance(value, dict):
            for sub in value:
                if sub not in out[key]:
                    raise ConfigError(f"unknown config key {key}.{sub}")
            out[key].update(value)
        else:
            out[key] = value
    return out


@dataclass
class ExperimentConfig:
    raw: dict = field(default_factory=lambda: copy.deepcopy(DEFAULT_CONFIG))

    @property
    def dataset(self) -> Path:
        return Path(self.raw["dataset"])

    @property
    def out(self) -> Path:
        return Path(self.raw["output_dir"])

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def split_seed(self) -> int:
        s = self.raw["split"]["seed"]
        return derive_seed(self.seed, "split") if s is None else int(s)

    @property
    def presets(self) -> list[str]:
        return list(self.raw["features"]["presets"])

    @property
    def ensemble(self) -> EnsembleConfig:
        e = self.raw["ensemble"]
        seed = derive_seed(self.seed, "ensemble") if e["seed"] is None else int(e["seed"])
        return EnsembleConfig(int(e["k"]), int(e["m"]), float(e["epsilon"]), seed, bool(e["coverage_check"]))

    @property
    def postprocess(self) -> PostprocessConfig:
        p = self.raw["postprocess"]
        return PostprocessConfig(p["strategy"], int(p["K"]), p["scope"])

    @property
    def svm(self) -> SvmHyper:
        return SvmHyper(float(self.raw["svm"]["lam"]), int(self.raw["svm"]["epochs"]))

    @property
    def methods(self) -> list[str]:
        return list(self.raw["methods"])

    @property
    def baselines_enabled(self) -> bool:
        return bool(self.raw["baselines"]["enabled"])

    def validate(self, need_dataset: bool = True) -> None:
        """Reject every bound violation before any work starts."""
        try:
            if need_dataset:
                if not self.raw["dataset"]:
                    raise ConfigError("no dataset given")
                if not self.dataset.is_file():
                    raise ConfigError(f"dataset not found: {self.dataset}")
            if int(self.raw["split"]["train_size"]) < 1:
                raise ConfigError("split.train_size must be >= 1")
            for p in self.presets + [self.raw["sweep"]["preset"]]:
                if p not in PRESETS:
                    raise ConfigError(f"unknown preset {p!r}; choose from {sorted(PRESETS)}")
            if not self.presets:
                raise ConfigError("features.presets is empty")
            self.ensemble.validate(6)
            self.postprocess
            self.svm
            if int(self.raw["baselines"]["knn_K"]) < 1:
                raise ConfigError("baselines.knn_K must be >= 1")
            if not self.methods:
                raise ConfigError("methods is empty")
            for m in self.methods:
                if m not in METHODS:
                    raise ConfigError(f"unknown method {m!r}; choose from {list(METHODS)}")
            if any(m in ("knn", "svm") for m in self.methods) and not self.baselines_enabled:
                raise ConfigError("methods include knn/svm but baselines are disabled")
            sw = self.raw["sweep"]
            for s in sw["strategies"]:
                if s not in ("sum", "wsum"):
                    raise ConfigError(f"sweep strategy must be sum or wsum, got {s!r}")
            if not sw["k_values"]:
                raise ConfigError("sweep.k_values is empty")
            if any(int(k) < 1 for k in sw["k_values"]):
                raise ConfigError("sweep.k_values must all be >= 1")
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    def echo(self) -> dict:
        d = copy.deepcopy(self.raw)
        d["split"]["seed"] = self.split_seed
        d["ensemble"] = asdict(self.ensemble)
        return d


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    raw = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = _merge(raw, json.load(fh))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return ExperimentConfig(_merge(raw, overrides))


# --- stage helpers -------------------------------------------------------


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _read_json(path: Path, what: str):
    if not path.is_file():
        raise ConfigError(f"{what} missing: {path} (run the earlier stage first)")
    return json.loads(path.read_text(encoding="utf-8"))


def _load_split(cfg: ExperimentConfig) -> tuple[Dataset, Dataset]:
    data = load_dataset(cfg.dataset, min_words=int(cfg.raw["features"]["min_words"]))
    info = _read_json(cfg.out / "split.json", "split file")
    by_id = {t.id: i for i, t in enumerate(data)}
    try:
        train = data.subset([by_id[i] for i in info["train_ids"]])
        test = data.subset([by_id[i] for i in info["test_ids"]])
    except KeyError as exc:
        raise ConfigError(f"split.json names tweet {exc} not in {cfg.dataset}") from None
    return train, test


def _load_features(cfg: ExperimentConfig, preset: str, train: Dataset, test: Dataset) -> PresetData:
    base = cfg.out / "features" / preset
    vocab = Vocabulary.from_dict(_read_json(base / "vocab.json", f"vocabulary for {preset}"))
    path = base / "vectors.jsonl"
    if not path.is_file():
        raise ConfigError(f"feature cache missing: {path} (run featurize first)")
    vectors = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            vectors[rec["id"]] = FeatureVector({int(k): v for k, v in rec["entries"]}, vocab.dimension)
    try:
        train_vecs = [vectors[t.id] for t in train]
        test_vecs = [vectors[t.id] for t in test]
    except KeyError as exc:
        raise ConfigError(f"feature cache for {preset} lacks tweet {exc}") from None
    return PresetData(preset, vocab, Csr.from_vectors(train_vecs, vocab.dimension), test_vecs)


# --- commands ---------------------------------------------------------------


def cmd_featurize(cfg: ExperimentConfig) -> int:
    cfg.validate()
    data = load_dataset(cfg.dataset, min_words=int(cfg.raw["features"]["min_words"]))
    data.require_labeled("featurize")
    train_size = int(cfg.raw["split"]["train_size"])
    if train_size > len(data):
        raise ConfigError(f"split.train_size {train_size} exceeds dataset size {len(data)}")
    train, test = split(data, train_size, cfg.split_seed)
    _write_json(
        cfg.out / "split.json",
        {
            "seed": cfg.split_seed,
            "train_size": train_size,
            "train_ids": [t.id for t in train],
            "test_ids": [t.id for t in test],
        },
    )
    print(f"split: {len(train)} train / {len(test)} test (seed {cfg.split_seed})")
    joint = bool(cfg.raw["features"]["joint_counting"])
    for name in cfg.presets:
        pd = PresetData.build(train, test, PRESETS[name], joint)
        base = cfg.out / "features" / name
        _write_json(base / "vocab.json", pd.vocab.to_dict())
        with open(base / "vectors.jsonl", "w", encoding="utf-8") as fh:
            for tweet, vec in zip(list(train) + list(test), _all_vectors(pd)):
                fh.write(json.dumps({"id": tweet.id, "entries": [[k, v] for k, v in vec.entries.items()]}) + "\n")
        stats = ", ".join(f"{k}={v}" for k, v in sorted(pd.vocab.stats.items()))
        print(f"{name}: dimension {pd.vocab.dimension} ({stats})")
    return 0


def _all_vectors(pd: PresetData):
    for r in range(pd.train_matrix.n_rows):
        yield pd.train_matrix.row(r)
    yield from pd.test_vectors


def cmd_train(cfg: ExperimentConfig) -> int:
    cfg.validate()
    train, test = _load_split(cfg)
    ens_cfg = cfg.ensemble
    train_log = {"ensemble": asdict(ens_cfg), "presets": {}}
    for name in cfg.presets:
        pd = _load_features(cfg, name, train, test)
        model = train_ensemble(train, pd.vocab, ens_cfg, SvmLearner(cfg.svm), pd.train_matrix)
        mdir = cfg.out / "models" / name
        mdir.mkdir(parents=True, exist_ok=True)
        save_ensemble(model, mdir / "ensemble.json")
        entry = {
            "labelsets": [list(ls) for ls in model.labelsets],
            "member_seeds": [derive_seed(ens_cfg.seed, "member", i) for i in range(len(model.members))],
        }
        if cfg.baselines_enabled:
            bl = train_baselines(
                train, pd.train_matrix, pd.vocab.digest,
                int(cfg.raw["baselines"]["knn_K"]), cfg.svm, cfg.seed,
            )
            _write_json(mdir / "baselines.json", bl.to_dict())
            entry["baseline_svm_seeds"] = [bl.svm_purpose.hyper.seed, bl.svm_position.hyper.seed]
        train_log["presets"][name] = entry
        print(f"{name}: {len(model.members)} labelsets {entry['labelsets']}")
    _write_json(cfg.out / "train_log.json", train_log)
    return 0


def _load_models(cfg: ExperimentConfig, name: str, pd: PresetData):
    mdir = cfg.out / "models" / name
    if not (mdir / "ensemble.json").is_file():
        raise ConfigError(f"model missing: {mdir / 'ensemble.json'} (run train first)")
    ensemble = load_ensemble(mdir / "ensemble.json", pd.vocab)
    baselines = None
    if (mdir / "baselines.json").is_file():
        baselines = Baselines.from_dict(_read_json(mdir / "baselines.json", "baselines"))
        if baselines.vocab_digest != pd.vocab.digest:
            raise ConfigError(f"baselines for {name} were trained on another vocabulary")
    return ensemble, baselines


def cmd_evaluate(cfg: ExperimentConfig) -> int:
    cfg.validate()
    train, test = _load_split(cfg)
    test.require_labeled("evaluate")
    post = cfg.postprocess
    cells = []
    audit = []
    for name in cfg.presets:
        pd = _load_features(cfg, name, train, test)
        ensemble, baselines = _load_models(cfg, name, pd)
        if baselines is None and any(m in ("knn", "svm") for m in cfg.methods):
            raise ConfigError(f"baselines for {name} were not trained")
        neighbors = None
        if any(m in ("rakel+sum", "rakel+wsum") for m in cfg.methods):
            neighbors = TrainingNeighbors(train, pd.vocab, pd.train_matrix)
        out = evaluate_preset(
            pd, test, cfg.methods, ensemble, baselines, neighbors,
            post.K, post.scope, cfg.seed, bool(cfg.raw["extras"]),
        )
        cells.extend(out.cells)
        for method, events in out.events.items():
            for ev in events:
                audit.append({"preset": name, "method": method, **ev.to_dict()})
        for c in out.cells:
            if c.error:
                log.error("%s/%s failed: %s", c.method, c.preset, c.error)
    report = EvalReport(cells, str(cfg.dataset.name), cfg.echo())
    (cfg.out / "report.json").write_text(report.to_json(), encoding="utf-8")
    (cfg.out / "report.txt").write_text(report.to_table(), encoding="utf-8")
    with open(cfg.out / "repair_audit.jsonl", "w", encoding="utf-8") as fh:
        for rec in audit:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    print(report.to_table(), end="")
    return 2 if any(c.error for c in cells) else 0


def cmd_sweep(cfg: ExperimentConfig) -> int:
    cfg.validate()
    sw = cfg.raw["sweep"]
    name = sw["preset"]
    k_values = [int(k) for k in sw["k_values"]]
    train, test = _load_split(cfg)
    pd = _load_features(cfg, name, train, test)
    ensemble, _ = _load_models(cfg, name, pd)
    preds = ensemble.predict_many(pd.test_vectors)
    neighbors = TrainingNeighbors(train, pd.vocab, pd.train_matrix)
    kmax = max(k_values)
    sets = [neighbors.find(x, kmax) for x in pd.test_vectors]
    scope = cfg.postprocess.scope
    series = {}
    for strategy in sw["strategies"]:
        series[strategy] = sweep_from_predictions(test.labels, preds, sets, strategy, k_values, scope)
    result = {
        "preset": name,
        "scope": scope,
        "series": {s: [[k, loss] for k, loss in pts] for s, pts in series.items()},
        "spread": {s: max(l for _, l in pts) - min(l for _, l in pts) for s, pts in series.items()},
    }
    _write_json(cfg.out / "sweep.json", result)
    with open(cfg.out / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write("strategy,K,hamming_loss\n")
        for s, pts in series.items():
            for k, loss in pts:
                fh.write(f"{s},{k},{loss!r}\n")
    for s, pts in series.items():
        print(f"{s}: {len(pts)} points, loss spread {result['spread'][s]:.4f}")
    if sw["plot"]:
        _plot_sweep(series, cfg.out / "sweep.png", name)
    return 0


def _plot_sweep(series: dict, path: Path, preset: str) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        log.warning("matplotlib not installed; skipping %s", path)
        return
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for s, pts in series.items():
        ax.plot([k for k, _ in pts], [l for _, l in pts], marker="o", label=f"RAkEL+{s}")
    ax.set_xlabel("K (neighbors)")
    ax.set_ylabel("Hamming loss")
    ax.set_title(f"K sensitivity ({preset})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_fixtures(cfg: ExperimentConfig | None = None) -> int:
    checks = fixtures.run_all()
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if all(ok for _, ok, _ in checks) else 2


def cmd_generate(args) -> int:
    from .synthetic import generate_corpus

    if args.n < 1:
        raise ConfigError("--n must be >= 1")
    data = generate_corpus(args.n, seed=args.seed, noise=args.noise)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_dataset(data, args.out)
    print(f"wrote {len(data)} tweets to {args.out}")
    return 0


# --- argument parsing ---------------------------------------------------------


def _csv(s: str) -> list[str]:
    return [x for x in s.split(",") if x]


def _overrides(args) -> dict:
    o: dict = {}

    def put(section, key, value):
        if value is None:
            return
        if section is None:
            o[key] = value
        else:
            o.setdefault(section, {})[key] = value

    put(None, "dataset", args.dataset)
    put(None, "output_dir", args.output_dir)
    put(None, "seed", args.seed)
    put("split", "train_size", args.train_size)
    put("features", "presets", _csv(args.presets) if args.presets else None)
    put("features", "joint_counting", True if args.joint_counting else None)
    put("features", "min_words", args.min_words)
    put("ensemble", "k", args.k)
    put("ensemble", "m", args.m)
    put("ensemble", "epsilon", args.epsilon)
    put("postprocess", "strategy", args.strategy)
    put("postprocess", "K", args.K)
    put("postprocess", "scope", args.scope)
    put("baselines", "enabled", False if args.no_baselines else None)
    put(None, "methods", _csv(args.methods) if args.methods else None)
    put("sweep", "preset", args.sweep_preset)
    put("sweep", "k_values", [int(k) for k in _csv(args.k_values)] if args.k_values else None)
    put("sweep", "plot", True if args.plot else None)
    put(None, "extras", True if args.extras else None)
    return o


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tweetpp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config; flags override it")
    common.add_argument("--dataset")
    common.add_argument("--output-dir")
    common.add_argument("--seed", type=int)
    common.add_argument("--train-size", type=int)
    common.add_argument("--presets", help="comma-separated, e.g. f1,f5")
    common.add_argument("--joint-counting", action="store_true", help="prune n-grams on train+test counts")
    common.add_argument("--min-words", type=int, help="drop tweets with fewer words")
    common.add_argument("--k", type=int, help="labelset size")
    common.add_argument("--m", type=int, help="number of labelsets")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--strategy", choices=STRATEGIES)
    common.add_argument("--K", type=int, help="post-processing neighbors")
    common.add_argument("--scope", choices=SCOPES)
    common.add_argument("--no-baselines", action="store_true")
    common.add_argument("--methods", help="comma-separated subset of " + ",".join(METHODS))
    common.add_argument("--sweep-preset")
    common.add_argument("--k-values", help="comma-separated K values for sweep")
    common.add_argument("--plot", action="store_true", help="write sweep.png (needs matplotlib)")
    common.add_argument("--extras", action="store_true", help="add subset accuracy to report cells")

    for name, helptext in (
        ("featurize", "split the dataset and build feature caches"),
        ("train", "train RAkEL ensembles and baselines"),
        ("evaluate", "score methods x presets"),
        ("sweep", "Hamming loss across post-processing K"),
    ):
        sub.add_parser(name, parents=[common], help=helptext)
    sub.add_parser("fixtures", help="replay the worked RAkEL and repair examples")
    gen = sub.add_parser("generate", help="write a synthetic labeled corpus")
    gen.add_argument("--out", required=True)
    gen.add_argument("--n", type=int, default=1000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise", type=float, default=0.45)
    return parser


COMMANDS = {
    "featurize": cmd_featurize,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "fixtures":
            return cmd_fixtures()
        if args.command == "generate":
            return cmd_generate(args)
        cfg = load_config(args.config, _overrides(args))
        return COMMANDS[args.command](cfg)
    except (ConfigError, DatasetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        log.debug("runtime failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
