"""Command line interface.

Subcommands cover the pipeline end to end: ``synth`` or ``ingest`` produce
a dataset bundle under the output directory, ``clean`` clusters an
embedding channel for review, ``train`` fits a head, ``eval`` reports test
metrics, ``ablate`` runs the feature grid, and ``attribute`` explains
predictions.  Exit codes: 0 success, 2 configuration or malformed input,
3 a data error at runtime.

Source paths in the config (manifest, footprints, rasters, images,
decisions) resolve from the working directory; pipeline artifacts
(dataset, head) live in the ``--out`` directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from effsense.attribution import (
    AttributionConfig,
    integrated_gradients,
    write_attribution_csv,
)
from effsense.classic import fit_majority
from effsense.cleaning.decisions import (
    apply_cleaning_decisions,
    read_decisions,
    write_decisions_template,
)
from effsense.cleaning.kmeans import kmeans, save_cluster_model
from effsense.cleaning.montage import export_cluster_montage
from effsense.dataset.embeddings import EmbeddingFormatError, read_embeddings
from effsense.dataset.geometry import AmbiguousJoinError
from effsense.dataset.ingest import (
    DatasetBundle,
    assemble_dataset,
    load_bundle,
    read_footprints,
    read_lst_dir,
    read_manifest,
    save_bundle,
    write_json,
)
from effsense.dataset.split import split_dataset
from effsense.dataset.types import BinaryClass, FeatureChannel
from effsense.evaluation.ablation import AblationSpec, run_ablation, table4_feature_subsets
from effsense.evaluation.metrics import confusion, delta_to_majority, macro_metrics
from effsense.evaluation.report import ReportRow, render_report
from effsense.evaluation.synth import SynthConfig, synth_generate
from effsense.fusion.features import MissingChannelError, build_feature_matrix, concat_features
from effsense.fusion.store import load_head, save_head
from effsense.fusion.train import TrainConfig, evaluate_head, train_head


class ConfigError(Exception):
    """Bad flags, bad config values, or malformed input files (exit 2)."""


class DataError(Exception):
    """The inputs parsed but their content cannot be processed (exit 3)."""


DEFAULTS: dict = {
    "seed": 0,
    "split": {"fractions": [0.8, 0.1, 0.1], "counts": None, "holdout_geography": None},
    "lst": {"threshold": 5.0, "reducer": "mean"},
    "ingest": {
        "manifest": "manifest.csv",
        "footprints": "footprints.geojson",
        "lst_dir": None,
        "embeddings": {},
    },
    "cleaning": {
        "dataset": "dataset.json",
        "channel": "SV",
        "k": 40,
        "max_iter": 100,
        "grid": [4, 4],
        "tile_size": 64,
        "images_dir": None,
        "decisions": None,
    },
    "model": {
        "dataset": "dataset.json",
        "channels": ["SV", "AV", "LST", "FP"],
        "head": "mlp",
        "learning_rate": 1e-4,
        "batch_size": 16,
        "epochs": 50,
        "dropout_p": 0.5,
        "class_weighted": True,
    },
    "eval": {"dataset": "dataset.json", "head_dir": "head"},
    "ablation": {
        "dataset": "dataset.json",
        "subsets": "table4",
        "head_kinds": ["linear", "mlp"],
    },
    "attribution": {
        "dataset": "dataset.json",
        "head_dir": "head",
        "ids": None,
        "limit": 16,
        "steps": 50,
        "baseline": "seeded-random",
    },
    "synth": {
        "n_records": 600,
        "class_balance": 0.65,
        "noise": 1.0,
        "embedding_dim": 32,
        "signal": {},
        "geography": "synthtown",
    },
}


def load_config(path: str | None) -> dict:
    """Defaults overlaid with the config file; unknown keys are errors."""
    merged = {
        key: dict(value) if isinstance(value, dict) else value
        for key, value in DEFAULTS.items()
    }
    if path is None:
        return merged
    try:
        user = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(user, dict):
        raise ConfigError("config root must be a JSON object")
    for key, value in user.items():
        if key not in merged:
            raise ConfigError(f"unknown config section {key!r}")
        if isinstance(merged[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config section {key!r} must be an object")
            for sub, subval in value.items():
                if sub not in merged[key]:
                    raise ConfigError(f"unknown config key {key}.{sub}")
                merged[key][sub] = subval
        else:
            merged[key] = value
    return merged


def _source_path(value: str, what: str) -> Path:
    path = Path(value)
    if not path.exists():
        raise ConfigError(f"{what} not found: {path}")
    return path


def _parse_channels(tags) -> list[FeatureChannel]:
    try:
        return [FeatureChannel.from_tag(t) for t in tags]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _load_out_bundle(out: Path, name: str) -> DatasetBundle:
    path = out / name
    if not path.exists():
        raise ConfigError(f"dataset not found: {path} (run synth or ingest first)")
    try:
        return load_bundle(path)
    except (EmbeddingFormatError, json.JSONDecodeError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load dataset {path}: {exc}") from None


def _apply_split(bundle: DatasetBundle, config: dict, seed: int) -> DatasetBundle:
    split_cfg = config["split"]
    try:
        split = split_dataset(
            bundle.records,
            seed=seed,
            counts=split_cfg.get("counts"),
            fractions=split_cfg.get("fractions") if not split_cfg.get("counts") else None,
            holdout_geography=split_cfg.get("holdout_geography"),
        )
    except ValueError as exc:
        raise ConfigError(f"cannot split dataset: {exc}") from None
    bundle.split = split
    return bundle


def _train_config(config: dict, seed: int) -> TrainConfig:
    model = config["model"]
    try:
        return TrainConfig(
            learning_rate=float(model["learning_rate"]),
            batch_size=int(model["batch_size"]),
            epochs=int(model["epochs"]),
            dropout_p=float(model["dropout_p"]),
            class_weights=None if model["class_weighted"] else (1.0, 1.0),
            seed=seed,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad model config: {exc}") from None


def cmd_synth(config: dict, seed: int, out: Path) -> None:
    section = config["synth"]
    try:
        synth_config = SynthConfig(
            n_records=int(section["n_records"]),
            class_balance=float(section["class_balance"]),
            signal={
                FeatureChannel.from_tag(tag): value
                for tag, value in (section["signal"] or {}).items()
            },
            noise=float(section["noise"]),
            embedding_dim=int(section["embedding_dim"]),
            geography=section["geography"],
            seed=seed,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad synth config: {exc}") from None
    bundle = synth_generate(synth_config)
    _apply_split(bundle, config, seed)
    path = save_bundle(bundle, out)
    write_json(out / "synth_config.json", {"seed": seed, "synth": section, "split": config["split"]})
    print(f"synth: {len(bundle.records)} records -> {path}")


def cmd_ingest(config: dict, seed: int, out: Path) -> None:
    section = config["ingest"]
    manifest = read_manifest(_source_path(section["manifest"], "manifest"))
    fp_ids, footprints = read_footprints(
        _source_path(section["footprints"], "footprint file")
    )
    observations = []
    if section.get("lst_dir"):
        observations = read_lst_dir(_source_path(section["lst_dir"], "LST directory"))
    embeddings = {}
    for tag, emb_path in (section.get("embeddings") or {}).items():
        channel = FeatureChannel.from_tag(tag)
        embeddings[channel] = read_embeddings(
            _source_path(emb_path, f"{tag} embeddings"), channel=channel
        )
    records, log = assemble_dataset(
        manifest,
        footprints,
        observations=observations,
        embeddings=embeddings,
        lst_threshold=float(config["lst"]["threshold"]),
        lst_reducer=config["lst"]["reducer"],
    )
    if not records:
        raise DataError("no manifest point matched any footprint")
    bundle = DatasetBundle(records=tuple(records), embeddings=embeddings)
    _apply_split(bundle, config, seed)
    path = save_bundle(bundle, out)
    write_json(
        out / "ingest_log.json",
        {
            "total": log.total,
            "matched": log.matched,
            "unmatched_ids": list(log.unmatched_ids),
            "missing_lst_ids": list(log.missing_lst_ids),
            "missing_channel_counts": log.missing_channel_counts,
        },
    )
    print(
        f"ingest: {log.matched}/{log.total} records matched, "
        f"{len(log.missing_lst_ids)} without LST -> {path}"
    )


def cmd_clean(config: dict, seed: int, out: Path) -> None:
    section = config["cleaning"]
    bundle = _load_out_bundle(out, section["dataset"])
    channel = FeatureChannel.from_tag(section["channel"])
    matrix = bundle.embeddings.get(channel)
    if matrix is None:
        raise DataError(f"dataset has no {channel.tag} embeddings to clean")
    ids = list(matrix.ids)
    try:
        model = kmeans(
            matrix.data.astype(np.float64),
            k=int(section["k"]),
            seed=seed,
            max_iter=int(section["max_iter"]),
        )
    except ValueError as exc:
        raise ConfigError(f"cannot cluster: {exc}") from None
    clean_dir = out / "cleaning"
    save_cluster_model(model, clean_dir)
    write_decisions_template(model, clean_dir / "decisions_template.csv")
    print(
        f"clean: k={model.k} objective={model.objective:.6g} "
        f"iterations={model.iterations_run} -> {clean_dir}"
    )

    if section.get("images_dir"):
        images_dir = _source_path(section["images_dir"], "images directory")
        image_paths = {rid: images_dir / f"{rid}.png" for rid in ids}
        grid = tuple(section["grid"])
        for cluster_id in range(model.k):
            if model.members(cluster_id).size == 0:
                continue
            export_cluster_montage(
                model,
                matrix.data.astype(np.float64),
                ids,
                image_paths,
                cluster_id,
                clean_dir / "montages" / f"cluster_{cluster_id:03d}.png",
                grid=grid,
                tile_size=int(section["tile_size"]),
            )
        print(f"clean: montages -> {clean_dir / 'montages'}")

    if section.get("decisions"):
        decisions = read_decisions(_source_path(section["decisions"], "decisions file"))
        try:
            kept_ids, report = apply_cleaning_decisions(ids, model, decisions)
        except ValueError as exc:
            raise DataError(f"cannot apply decisions: {exc}") from None
        kept = set(kept_ids)
        cleaned = DatasetBundle(
            records=tuple(r for r in bundle.records if r.id in kept),
            embeddings=bundle.embeddings,
            split=None,
        )
        _apply_split(cleaned, config, seed)
        save_bundle(cleaned, out, name="cleaned_dataset")
        lines = ["id,cluster_id,reason"]
        lines.extend(f"{r.id},{r.cluster_id},{r.reason}" for r in report.removed)
        (clean_dir / "removal_report.csv").write_text(
            "".join(f"{line}\n" for line in lines), encoding="utf-8"
        )
        print(
            f"clean: removed {len(report.removed)} records -> "
            f"{out / 'cleaned_dataset.json'}"
        )


def cmd_train(config: dict, seed: int, out: Path) -> None:
    section = config["model"]
    bundle = _load_out_bundle(out, section["dataset"])
    channels = _parse_channels(section["channels"])
    head_kind = section["head"]
    if head_kind not in ("linear", "mlp"):
        raise ConfigError(f"unknown head kind {head_kind!r}")
    train_cfg = _train_config(config, seed)
    try:
        head = train_head(bundle, channels, head_kind, train_cfg)
    except MissingChannelError as exc:
        raise DataError(str(exc)) from None
    except ValueError as exc:
        raise DataError(f"cannot train: {exc}") from None
    head_dir = out / "head"
    save_head(head, head_dir)
    write_json(out / "train_config.json", {"seed": seed, "model": section})
    best = head.history.val_macro_f1[head.history.best_epoch]
    print(
        f"train: {head_kind} on {'+'.join(c.tag for c in head.channels)} "
        f"best val macro-F1 {best * 100:.2f} (epoch {head.history.best_epoch}) "
        f"-> {head_dir}"
    )


def _majority_report(bundle: DatasetBundle):
    train_records = bundle.records_for(bundle.split.train)
    test_records = bundle.records_for(bundle.split.test)
    model = fit_majority([r.binary for r in train_records])
    preds = [BinaryClass(int(v)) for v in model.predict(np.zeros((len(test_records), 1)))]
    truth = [r.binary for r in test_records]
    return macro_metrics(confusion(truth, preds))


def cmd_eval(config: dict, seed: int, out: Path) -> None:
    section = config["eval"]
    bundle = _load_out_bundle(out, section["dataset"])
    if bundle.split is None:
        raise DataError("dataset has no split")
    if not bundle.split.test:
        raise DataError("test split is empty")
    head_dir = out / section["head_dir"]
    if not (head_dir / "head.json").exists():
        raise ConfigError(f"no trained head at {head_dir} (run train first)")
    head = load_head(head_dir)
    majority = _majority_report(bundle)
    try:
        head_report = evaluate_head(head, bundle, bundle.split.test)
    except MissingChannelError as exc:
        raise DataError(str(exc)) from None
    features = "+".join(c.tag for c in head.channels)
    rows = [
        ReportRow("baseline", "none", "majority", majority, None),
        ReportRow(
            "fusion",
            features,
            head.params.head_kind,
            head_report,
            delta_to_majority(head_report, majority),
        ),
    ]
    report_csv = render_report(rows, fmt="csv")
    (out / "report.csv").write_text(report_csv, encoding="utf-8")
    (out / "report.md").write_text(render_report(rows, fmt="markdown"), encoding="utf-8")
    write_json(out / "eval_config.json", {"seed": seed, "eval": section})
    sys.stdout.write(report_csv)


def cmd_ablate(config: dict, seed: int, out: Path) -> None:
    section = config["ablation"]
    bundle = _load_out_bundle(out, section["dataset"])
    if bundle.split is None:
        raise DataError("dataset has no split")
    if section["subsets"] == "table4":
        subsets = table4_feature_subsets()
    else:
        try:
            subsets = tuple(
                frozenset(_parse_channels(tags)) for tags in section["subsets"]
            )
        except TypeError:
            raise ConfigError("ablation.subsets must be 'table4' or a list of tag lists") from None
    try:
        spec = AblationSpec(
            feature_subsets=subsets,
            head_kinds=tuple(section["head_kinds"]),
            train_config=_train_config(config, seed),
            seed=seed,
        )
    except ValueError as exc:
        raise ConfigError(f"bad ablation config: {exc}") from None
    try:
        ablation_rows = run_ablation(bundle, spec)
    except MissingChannelError as exc:
        raise DataError(str(exc)) from None
    except ValueError as exc:
        raise DataError(f"cannot run ablation: {exc}") from None
    majority = _majority_report(bundle)
    rows = [ReportRow("baseline", "none", "majority", majority, None)]
    rows.extend(
        ReportRow(
            "ablation",
            row.features,
            row.head_kind,
            row.report,
            delta_to_majority(row.report, majority),
        )
        for row in ablation_rows
    )
    report_csv = render_report(rows, fmt="csv")
    (out / "ablation.csv").write_text(report_csv, encoding="utf-8")
    write_json(out / "ablation_config.json", {"seed": seed, "ablation": section})
    print(f"ablate: {len(ablation_rows)} trials -> {out / 'ablation.csv'}")


def cmd_attribute(config: dict, seed: int, out: Path) -> None:
    section = config["attribution"]
    bundle = _load_out_bundle(out, section["dataset"])
    if bundle.split is None:
        raise DataError("dataset has no split")
    head_dir = out / section["head_dir"]
    if not (head_dir / "head.json").exists():
        raise ConfigError(f"no trained head at {head_dir} (run train first)")
    head = load_head(head_dir)
    if section.get("ids"):
        ids = list(section["ids"])
        unknown = [i for i in ids if i not in {r.id for r in bundle.records}]
        if unknown:
            raise DataError(f"attribution ids not in dataset: {unknown}")
    else:
        ids = sorted(bundle.split.test)[: int(section["limit"])]
    if not ids:
        raise DataError("no records to attribute")

    baseline_kind = section["baseline"]
    ranges = None
    if baseline_kind == "seeded-random":
        train_records = bundle.records_for(bundle.split.train)
        x_train, _ = build_feature_matrix(
            train_records, head.channels, head.stats, bundle.embeddings
        )
        ranges = (x_train.min(axis=0), x_train.max(axis=0))
    try:
        attr_config = AttributionConfig(
            steps=int(section["steps"]),
            baseline=baseline_kind,
            baseline_seed=seed,
            ranges=ranges,
        )
    except ValueError as exc:
        raise ConfigError(f"bad attribution config: {exc}") from None

    results = {}
    for rid in ids:
        record = bundle.record_by_id(rid)
        try:
            fused = concat_features(record, head.channels, head.stats, bundle.embeddings)
        except MissingChannelError as exc:
            raise DataError(str(exc)) from None
        results[rid] = integrated_gradients(head.params, fused, attr_config)
    write_attribution_csv(out / "attributions.csv", results)
    write_json(out / "attribution_config.json", {"seed": seed, "attribution": section})
    print(f"attribute: {len(results)} records -> {out / 'attributions.csv'}")


_COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "clean": cmd_clean,
    "train": cmd_train,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "attribute": cmd_attribute,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effsense",
        description="Building energy efficiency classification pipeline",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--out", default="out", help="workspace directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        seed = args.seed if args.seed is not None else int(config["seed"])
        if seed < 0:
            raise ConfigError("seed must be non-negative")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](config, seed, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except AmbiguousJoinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EmbeddingFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
