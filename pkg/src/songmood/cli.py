"""Command-line driver: fetch, features, train, evaluate, rfe, report.

Exit codes: 0 success, 1 completed with failed grid cells, 2 usage or
infrastructure errors. Every command is reproducible: outputs depend only
on (config, seed). Wall-clock details go to the log, never into report
files.
"""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from songmood.config import RunConfig, load_config
from songmood.dataset import assign_splits, load_corpus
from songmood.evaluation import (
    EvaluationReport,
    coefficient_report,
    run_feature_subset_comparison,
    run_modality_grid,
)
from songmood.pipeline import build_features
from songmood.regressors import FAMILIES, grid_search, save_regressor
from songmood.regressors.grid import derive_seed
from songmood.selection import FeatureMatrix, rfe, search_lyric_combination
from songmood.spotify import ApiCredentials, CredentialError, SpotifyClient
from songmood.text_features import load_affect_lexicon, load_sentiment_lexicon
from songmood import reports

log = logging.getLogger(__name__)

USAGE_ERROR = 2
PARTIAL = 1


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(USAGE_ERROR)


def _config_from(ctx_params: dict) -> RunConfig:
    overrides = {
        k: ctx_params.get(k)
        for k in ("seed", "jobs", "output_dir")
        if ctx_params.get(k) is not None
    }
    try:
        return load_config(ctx_params.get("config"), overrides)
    except (OSError, ValueError) as exc:
        _fail(str(exc))


def common_options(fn):
    fn = click.option("--config", type=click.Path(exists=True),
                      help="flat key=value config file")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="master random seed")(fn)
    fn = click.option("--jobs", type=int, default=None,
                      help="parallel worker bound")(fn)
    fn = click.option("--output-dir", type=click.Path(), default=None)(fn)
    return fn


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_tagged_corpus(config: RunConfig):
    config.require_paths("dataset_csv", "lyrics_dir", "audio_store")
    corpus = load_corpus(config.dataset_csv, config.lyrics_dir, config.audio_store)
    if len(corpus) == 0:
        return corpus
    return assign_splits(corpus, ratios=config.split_ratios, seed=config.seed)


@main.command()
@common_options
def fetch(**params):
    """Fetch audio features from the Spotify API into the audio store."""
    config = _config_from(params)
    try:
        config.require_paths("dataset_csv")
    except ValueError as exc:
        _fail(str(exc))
    try:
        creds = ApiCredentials.from_env()
    except CredentialError as exc:
        _fail(str(exc))

    from songmood.dataset import _read_dataset_csv
    records = _read_dataset_csv(Path(config.dataset_csv))
    store_path = config.audio_store or str(Path(config.output_dir) / "audio_features.json")
    client = SpotifyClient(creds)
    try:
        matches, unmatched = client.resolve_tracks(records)
        summary = client.fetch_audio_features(matches, store_path)
    except CredentialError as exc:
        _fail(str(exc))
    click.echo(
        f"matched {len(matches)}/{len(records)} songs; "
        f"fetched {summary['fetched']}, skipped {summary['skipped']} cached, "
        f"{summary['invalid']} invalid"
    )
    if unmatched:
        report_path = Path(config.output_dir) / "unmatched.json"
        report_path.parent.mkdir(parents=True, exist_ok=True)
        report_path.write_text(json.dumps(unmatched, indent=1, sort_keys=True))
        click.echo(f"unmatched report: {report_path}")


def _features_dir(config: RunConfig) -> Path:
    return Path(config.output_dir) / "features"


@main.command()
@common_options
def features(**params):
    """Build and persist every feature matrix and fitted feature model."""
    config = _config_from(params)
    try:
        corpus = _load_tagged_corpus(config)
        if len(corpus) == 0:
            _fail("corpus is empty")
        sentiment = load_sentiment_lexicon(config.sentiment_lexicon or None)
        affect = load_affect_lexicon(config.affect_lexicon or None)
        audio_subset = (
            config.audio_subset if config.audio_subset in ("paper", "auto")
            else tuple(s.strip() for s in config.audio_subset.split(","))
        )
        artifacts = build_features(
            corpus, sentiment, affect,
            max_vocab=config.max_vocab, pca_k=config.pca_k,
            audio_subset=audio_subset, alpha=config.alpha, seed=config.seed,
        )
    except ValueError as exc:
        _fail(str(exc))

    out = _features_dir(config)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("audio", "audio_selected", "vader", "tfidf", "anew",
                 "fused_all", "fused_selected"):
        getattr(artifacts, name).save(out / f"{name}.json")
    (out / "raw_audio.json").write_text(json.dumps({
        "names": list(artifacts.raw_audio_names),
        "values": artifacts.raw_audio.tolist(),
    }, sort_keys=True))
    (out / "targets.json").write_text(json.dumps(
        {k: v.tolist() for k, v in artifacts.targets.items()}, sort_keys=True
    ))
    (out / "splits.json").write_text(json.dumps(
        {k: v.tolist() for k, v in artifacts.splits.items()}, sort_keys=True
    ))
    subset = artifacts.audio_subset
    (out / "audio_subset.json").write_text(json.dumps(
        subset.details | {"columns": list(subset.columns)}
        if hasattr(subset, "columns") else {"columns": list(subset)},
        sort_keys=True,
    ))
    models_dir = out / "models"
    models_dir.mkdir(exist_ok=True)
    for name, model in artifacts.models.items():
        (models_dir / f"{name}.json").write_text(
            json.dumps(model.to_json_dict(), sort_keys=True)
        )
    click.echo(
        f"features written to {out} "
        f"(fused_all d={artifacts.fused_all.d}, "
        f"fused_selected d={artifacts.fused_selected.d})"
    )


def _load_features(config: RunConfig) -> dict:
    out = _features_dir(config)
    required = ["audio", "audio_selected", "vader", "tfidf", "anew",
                "fused_all", "fused_selected"]
    loaded = {}
    for name in required:
        path = out / f"{name}.json"
        if not path.is_file():
            _fail(f"missing feature file {path}; run `songmood features` first")
        loaded[name] = FeatureMatrix.load(path)
    for name in ("targets", "splits", "raw_audio"):
        path = out / f"{name}.json"
        if not path.is_file():
            _fail(f"missing feature file {path}")
        loaded[name] = json.loads(path.read_text())
    loaded["targets"] = {k: np.asarray(v) for k, v in loaded["targets"].items()}
    loaded["splits"] = {k: np.asarray(v, dtype=int) for k, v in loaded["splits"].items()}
    return loaded


def _family_filter(only: str | None) -> tuple[str, ...]:
    if not only:
        return FAMILIES
    if only not in FAMILIES:
        _fail(f"unknown model family {only!r}")
    return (only,)


@main.command()
@common_options
@click.option("--only", type=str, default=None, help="restrict to one family")
@click.option("--modality", type=click.Choice(["audio", "lyrics", "multi"]),
              default=None)
def evaluate(only, modality, **params):
    """Run the full result grid and write report files."""
    config = _config_from(params)
    loaded = _load_features(config)
    families = _family_filter(only)
    modalities = (modality,) if modality else ("audio", "lyrics", "multi")

    matrices = {
        "audio": loaded["audio_selected"],
        "lyrics": _fuse_lyrics(loaded),
        "multi": loaded["fused_selected"],
    }
    report = run_modality_grid(
        matrices, loaded["targets"], loaded["splits"],
        grids=config.grids, seed=config.seed, families=families,
        modalities=modalities, folds=config.folds, jobs=config.jobs,
    )

    lyric_parts = {"tfidf": loaded["tfidf"], "anew": loaded["anew"],
                   "vader": loaded["vader"]}
    combos = search_lyric_combination(
        lyric_parts, loaded["targets"],
        loaded["splits"]["train"], loaded["splits"]["validation"],
        families=families, seed=config.seed,
    )
    report.combination_table = combos.table()

    raw = loaded["raw_audio"]
    compound = loaded["vader"].values[:, 3]
    report.coefficient_table = coefficient_report(
        np.asarray(raw["values"]), tuple(raw["names"]), compound,
        loaded["targets"], loaded["splits"]["train"], alpha=config.alpha,
    )

    report.feature_subset_table = run_feature_subset_comparison(
        loaded["audio"], lyric_parts, loaded["targets"], loaded["splits"],
        seed=config.seed,
    )

    rfe_results = {}
    for target, y in loaded["targets"].items():
        train = loaded["splits"]["train"]
        fm = loaded["fused_selected"]
        train_fm = FeatureMatrix(
            values=fm.values[train], column_names=fm.column_names,
            modality_tags=fm.modality_tags,
            row_ids=tuple(fm.row_ids[i] for i in train),
        )
        n_keep = min(config.rfe_keep, train_fm.d)
        subset, order = rfe(train_fm, y[train], n_keep)
        rfe_results[target] = {
            "survivors": list(subset.columns), "eliminated": order,
        }

    report.metadata["combination_winner"] = combos.winner
    full = report.to_json_dict()
    full["rfe"] = rfe_results

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(full, sort_keys=True, indent=1)
    )
    reports.write_all(full, out_dir)

    n_failed = sum(1 for c in report.cells.values() if c["status"] != "ok")
    click.echo(
        f"{len(report.cells)}-cell grid written to {out_dir} "
        f"({n_failed} failed cells); combination winner: {combos.winner}"
    )
    if n_failed:
        sys.exit(PARTIAL)


def _fuse_lyrics(loaded: dict) -> FeatureMatrix:
    from songmood.selection import fuse
    return fuse([loaded["vader"], loaded["tfidf"]])


@main.command()
@common_options
@click.option("--only", type=str, default=None, help="restrict to one family")
def train(only, **params):
    """Grid-search and persist final models on the fused selected features."""
    config = _config_from(params)
    loaded = _load_features(config)
    families = _family_filter(only)
    fm = loaded["fused_selected"]
    train_idx = loaded["splits"]["train"]
    out_dir = Path(config.output_dir) / "models"
    out_dir.mkdir(parents=True, exist_ok=True)
    for family in families:
        for target, y in loaded["targets"].items():
            result = grid_search(
                family, config.grids.get(family, {}),
                fm.values[train_idx], y[train_idx],
                folds=config.folds,
                seed=derive_seed(config.seed, "train", family, target),
                feature_names=fm.column_names,
            )
            path = out_dir / f"{family}_{target}.json"
            save_regressor(result.best_model, path)
            click.echo(
                f"{family}/{target}: train R2="
                f"{result.best_model.train_r2:.4f} -> {path}"
            )


@main.command(name="rfe")
@common_options
@click.option("--n-keep", type=int, default=None)
def rfe_command(n_keep, **params):
    """Recursive feature elimination on the fused selected features."""
    config = _config_from(params)
    loaded = _load_features(config)
    keep = n_keep or config.rfe_keep
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = {}
    for target, y in loaded["targets"].items():
        train = loaded["splits"]["train"]
        fm = loaded["fused_selected"]
        train_fm = FeatureMatrix(
            values=fm.values[train], column_names=fm.column_names,
            modality_tags=fm.modality_tags,
            row_ids=tuple(fm.row_ids[i] for i in train),
        )
        subset, order = rfe(train_fm, y[train], min(keep, train_fm.d))
        results[target] = {"survivors": list(subset.columns), "eliminated": order}
        click.echo(f"{target}: kept {len(subset.columns)} features")
    (out_dir / "rfe.json").write_text(json.dumps(results, sort_keys=True, indent=1))
    reports.write_rfe(results, out_dir)


@main.command()
@common_options
def report(**params):
    """Regenerate CSV/Markdown tables from an existing report.json."""
    config = _config_from(params)
    path = Path(config.output_dir) / "report.json"
    if not path.is_file():
        _fail(f"no report at {path}; run `songmood evaluate` first")
    reports.write_all(json.loads(path.read_text()), Path(config.output_dir))
    click.echo(f"tables regenerated in {config.output_dir}")


if __name__ == "__main__":
    main()
