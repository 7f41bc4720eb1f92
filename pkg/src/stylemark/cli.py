"""Command-line front end wiring corpus -> features -> models -> evaluation.

Corpus directories hold one subdirectory per author; a document is a
``.txt`` file with an optional ``.ann`` annotation file of the same
basename. Every command is deterministic given its inputs and --seed.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Optional

import click

from . import eval as evaluation
from .corpus import load_corpus, load_document, write_annotations
from .exceptions import StylemarkError
from .features import (
    DEFAULT_KEYWORD_SIZE,
    build_profiles,
    extract_features,
    feature_schema,
)
from .models import (
    ML_KINDS,
    MODEL_KINDS,
    STAT_KINDS,
    TrainConfig,
    load_artifact,
    profile_from_payload,
    save_artifact,
    train_config_from_dict,
)
from .mlp import mlp_from_payload, mlp_to_payload, predict_mlp, train_mlp
from .stat_models import classify_stat
from .svm import predict_svm, svm_from_payload, svm_to_payload, train_svm
from .synth import generate_synthetic_corpus, load_synth_spec
from .tree import predict_tree, train_tree, tree_from_payload, tree_to_payload


def _load_stopwords(path: Optional[str]) -> frozenset[str]:
    if path is None:
        text = resources.files("stylemark").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def _load_config(config_path: Optional[str], seed: int) -> TrainConfig:
    if config_path is None:
        cfg = TrainConfig(seed=seed)
        cfg.validate()
        return cfg
    data = json.loads(Path(config_path).read_text(encoding="utf-8"))
    return train_config_from_dict(data, seed=seed)


def _write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")


def _fail(exc: Exception) -> "click.ClickException":
    return click.ClickException(str(exc))


@click.group()
def main() -> None:
    """Authorship identification from stylistic markers."""


_seed_option = click.option("--seed", type=int, required=True, help="RNG seed; required for reproducibility.")
_k_option = click.option("--k", type=int, default=10, show_default=True, help="Number of cross-validation folds.")
_keywords_option = click.option("--keywords", type=int, default=DEFAULT_KEYWORD_SIZE, show_default=True, help="Keyword-set size per author.")
_stopwords_option = click.option("--stopwords", "stopwords_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Stopword list, one token per line (default: bundled list).")
_config_option = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON file overriding training hyperparameters.")


@main.command("synth")
@click.argument("spec_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Directory to write the corpus into.")
def cmd_synth(spec_path: str, out_dir: str) -> None:
    """Generate a seeded synthetic corpus from a JSON spec file."""
    try:
        spec = load_synth_spec(spec_path)
        docs = generate_synthetic_corpus(spec)
        root = Path(out_dir)
        for doc in docs:
            author_dir = root / doc.author
            author_dir.mkdir(parents=True, exist_ok=True)
            stem = doc.id.split("/")[-1]
            (author_dir / f"{stem}.txt").write_text(doc.text, encoding="utf-8")
            write_annotations(doc, author_dir / f"{stem}.ann")
    except (StylemarkError, ValueError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {len(docs)} documents to {out_dir}")


@main.command("profile")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@_keywords_option
@_stopwords_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def cmd_profile(corpus_dir: str, keywords: int, stopwords_path: Optional[str], out_path: str) -> None:
    """Build author profiles (keyword sets and centroids) as JSON."""
    try:
        docs = load_corpus(corpus_dir)
        stopwords = _load_stopwords(stopwords_path)
        profiles = build_profiles(docs, keywords, stopwords)
        schema = feature_schema([p.author for p in profiles])
        payload = {
            "schema": list(schema),
            "profiles": [
                {
                    "author": p.author,
                    "keywords": sorted(p.keywords),
                    "keyword_capacity": p.keyword_capacity,
                    "n_train_docs": p.n_train_docs,
                    "centroid": list(p.centroid.values),
                }
                for p in profiles
            ],
        }
        _write(Path(out_path), json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except (StylemarkError, ValueError) as exc:
        raise _fail(exc)
    click.echo(f"wrote profiles for {len(profiles)} authors to {out_path}")


@main.command("train")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_kind", type=click.Choice(MODEL_KINDS), required=True)
@_seed_option
@_keywords_option
@_stopwords_option
@_config_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def cmd_train(corpus_dir, model_kind, seed, keywords, stopwords_path, config_path, out_path) -> None:
    """Train a model on a whole corpus and save the artifact."""
    try:
        docs = load_corpus(corpus_dir)
        stopwords = _load_stopwords(stopwords_path)
        cfg = _load_config(config_path, seed)
        profiles = build_profiles(docs, keywords, stopwords)
        schema = feature_schema([p.author for p in profiles])
        if model_kind in STAT_KINDS:
            payload = {"measure": model_kind}
        else:
            vectors = [extract_features(d, profiles) for d in docs]
            labels = [d.author for d in docs]
            if model_kind == "dt":
                payload = {"tree": tree_to_payload(train_tree(vectors, labels, cfg))}
            elif model_kind == "nn":
                payload = {"mlp": mlp_to_payload(train_mlp(vectors, labels, cfg))}
            else:
                payload = {"svm": svm_to_payload(train_svm(vectors, labels, cfg))}
        save_artifact(out_path, model_kind, schema, profiles, payload)
    except (StylemarkError, ValueError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {model_kind} model to {out_path}")


@main.command("classify")
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("doc_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--annotation", "ann_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Annotation file for the document.")
def cmd_classify(model_path: str, doc_path: str, ann_path: Optional[str]) -> None:
    """Classify one document with a saved model; JSON on stdout."""
    try:
        artifact = load_artifact(model_path)
        schema = tuple(artifact["schema"])
        profiles = [profile_from_payload(p, schema) for p in artifact["profiles"]]
        derived = feature_schema([p.author for p in profiles])
        if derived != schema:
            raise StylemarkError(
                f"model schema mismatch: artifact declares {list(schema)} but "
                f"its profiles imply {list(derived)}"
            )
        doc = load_document(doc_path, ann_path)
        vector = extract_features(doc, profiles)
        kind = artifact["kind"]
        result = {"doc_id": doc.id, "model_kind": kind}
        if kind in STAT_KINDS:
            pred = classify_stat(vector, profiles)
            result.update(
                {
                    "label": pred.label(kind),
                    "cos": pred.cos,
                    "cs": pred.cs,
                    "ed": pred.ed,
                    "com": pred.com,
                    "scores": {m: dict(s) for m, s in pred.scores.items()},
                }
            )
        elif kind == "dt":
            model = tree_from_payload(artifact["model"]["tree"], schema)
            label, dist = predict_tree(model, vector)
            result.update({"label": label, "distribution": dist})
        elif kind == "nn":
            model = mlp_from_payload(artifact["model"]["mlp"], schema)
            result["label"] = predict_mlp(model, vector)
        else:
            model = svm_from_payload(artifact["model"]["svm"], schema)
            result["label"] = predict_svm(model, vector)
    except (StylemarkError, ValueError) as exc:
        raise _fail(exc)
    click.echo(json.dumps(result, indent=2, sort_keys=True))


@main.command("evaluate")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_kind", type=click.Choice(MODEL_KINDS), required=True)
@_seed_option
@_k_option
@_keywords_option
@_stopwords_option
@_config_option
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def cmd_evaluate(corpus_dir, model_kind, seed, k, keywords, stopwords_path, config_path, out_dir) -> None:
    """Cross-validate a model; writes report JSON plus CSV tables."""
    try:
        docs = load_corpus(corpus_dir)
        stopwords = _load_stopwords(stopwords_path)
        cfg = _load_config(config_path, seed)
        report = evaluation.cross_validate(
            model_kind, docs, k, cfg, keyword_size=keywords, stopwords=stopwords
        )
        out = Path(out_dir)
        _write(out / f"cv_{model_kind}.json", report.to_json())
        _write(out / f"cv_{model_kind}_folds.csv", report.folds_to_csv())
        _write(out / f"cv_{model_kind}_confusion.csv", report.confusion.to_csv())
    except (StylemarkError, ValueError) as exc:
        raise _fail(exc)
    click.echo(
        f"{model_kind}: mean accuracy {report.mean_accuracy:.4f}, "
        f"avg error {report.confusion.avg_error():.4f}"
    )


@main.command("ablate")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_kind", type=click.Choice(MODEL_KINDS), required=True)
@_seed_option
@_k_option
@_keywords_option
@_stopwords_option
@_config_option
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def cmd_ablate(corpus_dir, model_kind, seed, k, keywords, stopwords_path, config_path, out_dir) -> None:
    """Drop each feature in turn and report the accuracy deltas."""
    try:
        docs = load_corpus(corpus_dir)
        stopwords = _load_stopwords(stopwords_path)
        cfg = _load_config(config_path, seed)
        report = evaluation.ablate(
            model_kind, docs, k, cfg, keyword_size=keywords, stopwords=stopwords
        )
        out = Path(out_dir)
        _write(out / f"ablation_{model_kind}.csv", report.to_csv())
        _write(out / f"ablation_{model_kind}.json", report.to_json())
    except (StylemarkError, ValueError) as exc:
        raise _fail(exc)
    click.echo(f"{model_kind}: full accuracy {report.full_accuracy:.4f}, "
               f"{len(report.entries)} features ablated")


@main.command("agreement")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@_seed_option
@_k_option
@_keywords_option
@_stopwords_option
@_config_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def cmd_agreement(corpus_dir, seed, k, keywords, stopwords_path, config_path, out_path) -> None:
    """Pairwise Cohen's kappa between dt, nn, and svm over shared folds."""
    try:
        docs = load_corpus(corpus_dir)
        stopwords = _load_stopwords(stopwords_path)
        cfg = _load_config(config_path, seed)
        kinds, matrix = evaluation.model_agreement(
            docs, k, cfg, ML_KINDS, keyword_size=keywords, stopwords=stopwords
        )
        payload = {
            "kinds": list(kinds),
            "kappa": [[float(x) for x in row] for row in matrix],
        }
        _write(Path(out_path), json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except (StylemarkError, ValueError) as exc:
        raise _fail(exc)
    click.echo(f"wrote {len(kinds)}x{len(kinds)} kappa matrix to {out_path}")


@main.command("baseline")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--which", type=click.Choice(["vr", "ngram"]), required=True)
@click.option("--ngram-n", type=int, default=1, show_default=True, help="Token n-gram order for the ngram baseline.")
@_seed_option
@_k_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def cmd_baseline(corpus_dir, which, ngram_n, seed, k, out_path) -> None:
    """Evaluate a baseline with the same fold protocol; confusion JSON."""
    try:
        docs = load_corpus(corpus_dir)
        report = evaluation.cross_validate_baseline(
            which, docs, k, seed, ngram_order=ngram_n
        )
        _write(Path(out_path), report.to_json())
    except (StylemarkError, ValueError) as exc:
        raise _fail(exc)
    click.echo(
        f"{which}: mean accuracy {report.mean_accuracy:.4f}, "
        f"avg error {report.confusion.avg_error():.4f}"
    )


if __name__ == "__main__":
    main()
