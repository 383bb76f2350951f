"""Command-line entry points for building artifacts, training, and serving."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from .config import AppConfig, ConfigError, load_config
from .corpus import (
    CorpusError,
    LabelRegistry,
    ReviewRecord,
    Segment,
    corpus_stats,
    default_registry,
    load_corpus,
    load_label_registry,
)
from .detector.families import FAMILIES
from .detector.features import (
    FeatureError,
    FeatureRecord,
    featurize,
    load_features,
    save_features,
)
from .detector.questions import (
    BankGenerationError,
    generate_question_bank,
    generic_bank,
    load_banks,
    save_banks,
)
from .detector.training import (
    TrainingError,
    f_beta,
    load_detector,
    predict,
    save_detector,
    train_detector,
)
from .evalkit import CountedOutcomes, fbeta_grid, precision_recall
from .feedback.evolve import EvolutionError, run_evolution
from .feedback.templates import TemplateError, TemplateRegistry
from .gateway import GatewayError
from .pipeline import (
    Deadline,
    DeadlineExceeded,
    PipelineSettings,
    review_from_request,
    run_pipeline,
)
from .prompts import PromptError, PromptSet
from .segmenter import segment_review, sentencize_review
from .splitter import SplitError, kfold, split_reviews

log = logging.getLogger(__name__)

VALIDATION_ERRORS = (
    CorpusError, ConfigError, TrainingError, FeatureError, SplitError,
    TemplateError, EvolutionError, PromptError, BankGenerationError,
    ValueError, KeyError, OSError, json.JSONDecodeError,
)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract here is usage text + exit 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--registry", help="label registry JSON (default: built-in)")
    parser.add_argument("--templates", help="feedback template JSON (default: built-in)")
    parser.add_argument("--prompts-dir", help="prompt template directory (default: built-in)")
    parser.add_argument("--detector-dir", help="directory the service loads detectors from")
    parser.add_argument("--backend", choices=["replay", "network"],
                        help="LLM gateway backend")
    parser.add_argument("--replay", help="replay responses JSON (fingerprint -> text)")
    parser.add_argument("--replay-fallback", help="fallback text for unscripted requests")
    parser.add_argument("--cache-dir", help="disk cache directory for completions")
    parser.add_argument("--model", help="model name sent to the completion API")
    parser.add_argument("--base-url", help="completion API base URL")
    parser.add_argument("--parallelism", type=int, help="concurrent gateway requests")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")


def _resolve_config(args: argparse.Namespace) -> AppConfig:
    overrides: dict[str, dict[str, Any]] = {}

    def put(section: str, key: str, value: Any) -> None:
        if value is not None:
            overrides.setdefault(section, {})[key] = value

    put("gateway", "backend", getattr(args, "backend", None))
    put("gateway", "replay_path", getattr(args, "replay", None))
    put("gateway", "replay_fallback", getattr(args, "replay_fallback", None))
    put("gateway", "cache_dir", getattr(args, "cache_dir", None))
    put("gateway", "model", getattr(args, "model", None))
    put("gateway", "base_url", getattr(args, "base_url", None))
    put("gateway", "parallelism", getattr(args, "parallelism", None))
    put("paths", "registry", getattr(args, "registry", None))
    put("paths", "templates", getattr(args, "templates", None))
    put("paths", "prompts_dir", getattr(args, "prompts_dir", None))
    put("paths", "detector_dir", getattr(args, "detector_dir", None))
    put("service", "port", getattr(args, "port", None))
    put("service", "deadline_s", getattr(args, "deadline", None))
    return load_config(args.config, overrides=overrides)


def _registry(config: AppConfig) -> LabelRegistry:
    if config.registry_path:
        return load_label_registry(config.registry_path)
    return default_registry()


def _templates(config: AppConfig) -> TemplateRegistry:
    if config.templates_path:
        return TemplateRegistry.from_file(config.templates_path)
    return TemplateRegistry.default()


def _prompts(config: AppConfig) -> PromptSet:
    if config.prompts_dir:
        return PromptSet.from_dir(config.prompts_dir)
    return PromptSet.default()


def _emit(payload: Any, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_reviews(args: argparse.Namespace, registry: LabelRegistry) -> list[ReviewRecord]:
    """Reviews from --text (one ad hoc review) or --in (corpus JSONL)."""
    if getattr(args, "text", None) is not None:
        context = {
            k: v for k, v in (
                ("abstract", getattr(args, "abstract", None)),
                ("summary", getattr(args, "summary", None)),
                ("strengths", getattr(args, "strengths", None)),
            ) if v
        }
        review_id = getattr(args, "review_id", None) or "adhoc"
        return [review_from_request(review_id, args.text, None, context)]
    if getattr(args, "infile", None) is None:
        raise CorpusError("either --text or --in is required")
    records = load_corpus(args.infile, registry)
    wanted = getattr(args, "review_id", None)
    if wanted:
        records = [r for r in records if r.id == wanted]
        if not records:
            raise CorpusError(f"review {wanted!r} not found in {args.infile}")
    if not records:
        raise CorpusError(f"corpus {args.infile} holds no reviews")
    for record in records:
        if not record.sentences:
            record.sentences = sentencize_review(record.id, record.sections)
    return records


def _segment_entry(review: ReviewRecord, tags, segments) -> dict:
    return {
        "review_id": review.id,
        "sentences": [
            {"index": s.index, "text": s.text, "section": s.section}
            for s in review.sentences
        ],
        "tags": [t.value for t in tags],
        "segments": [
            {"start": seg.start, "end": seg.end, "text": seg.text}
            for seg in segments
        ],
    }


def cmd_segment(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    prompts = _prompts(config)
    gateway = config.gateway.build()
    reviews = _load_reviews(args, registry)
    entries = []
    for review in reviews:
        tags, segments = segment_review(review, gateway, prompts, config.gateway)
        entries.append(_segment_entry(review, tags, segments))
    _emit(entries[0] if args.text is not None else {"reviews": entries}, args.out)
    return 0


def cmd_questions(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    prompts = _prompts(config)
    gateway = config.gateway.build()
    records = load_corpus(args.corpus, registry)
    exemplars: dict[str, list[Segment]] = {}
    for record in records:
        for seg in record.segments:
            for key in seg.labels:
                bucket = exemplars.setdefault(key, [])
                if len(bucket) < args.max_exemplars:
                    bucket.append(seg)
    banks = {}
    for label in registry.detectable():
        found = exemplars.get(label.key, [])
        if not found:
            if args.generic_missing:
                banks[label.key] = generic_bank(label, args.n)
                continue
            raise BankGenerationError(
                label.key, "no exemplar segments in the corpus "
                "(pass --generic-missing to use a generic bank)")
        banks[label.key] = generate_question_bank(
            label, found, gateway, prompts, config.gateway, n=args.n)
    if not args.out:
        raise ConfigError("questions requires --out")
    save_banks(banks, registry.version, args.out)
    _emit({"banks": args.out, "labels": sorted(banks),
           "questions_per_label": args.n}, None)
    return 0


def cmd_featurize(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    prompts = _prompts(config)
    gateway = config.gateway.build()
    banks, banks_version = load_banks(args.banks)
    if banks_version != registry.version:
        raise FeatureError(
            f"banks were built for registry {banks_version!r}, "
            f"active registry is {registry.version!r}")
    records = load_corpus(args.corpus, registry)
    out_records = []
    for record in records:
        for seg in record.segments:
            vector = featurize(seg, banks, registry, gateway, prompts, config.gateway)
            out_records.append(FeatureRecord(
                review_id=record.id, start=seg.start, end=seg.end,
                vector=vector, labels=set(seg.labels)))
    if not args.out:
        raise ConfigError("featurize requires --out")
    save_features(out_records, args.out)
    _emit({"features": args.out, "segments": len(out_records)}, None)
    return 0


def _examples(records: Sequence[FeatureRecord]):
    return [(r.vector, set(r.labels)) for r in records]


def cmd_train(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    banks, banks_version = load_banks(args.banks)
    if banks_version != registry.version:
        raise TrainingError(
            f"banks were built for registry {banks_version!r}, "
            f"active registry is {registry.version!r}")
    train = load_features(args.train)
    valid = load_features(args.valid)
    families = args.families.split(",") if args.families else list(FAMILIES)
    detector = train_detector(_examples(train), _examples(valid), registry, banks,
                              families=families, beta=args.beta, seed=args.seed)
    if not args.out:
        raise ConfigError("train requires --out")
    save_detector(detector, args.out)
    _emit({
        "detector": args.out,
        "family": detector.family,
        "beta": detector.beta_target,
        "validation_fbeta": detector.validation_fbeta,
        "per_label_fbeta": {k: detector.per_label_fbeta[k]
                            for k in sorted(detector.per_label_fbeta)},
    }, None)
    return 0


def cmd_crossval(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    banks, banks_version = load_banks(args.banks)
    if banks_version != registry.version:
        raise TrainingError(
            f"banks were built for registry {banks_version!r}, "
            f"active registry is {registry.version!r}")
    records = load_corpus(args.corpus, registry)
    features = load_features(args.features)
    by_review: dict[str, list[FeatureRecord]] = {}
    for rec in features:
        by_review.setdefault(rec.review_id, []).append(rec)
    missing = [r.id for r in records if r.id not in by_review]
    if missing:
        raise TrainingError(f"features file lacks reviews: {missing}")

    folds = kfold(records, args.k, seed=args.seed)
    by_id = {r.id: r for r in records}
    families = args.families.split(",") if args.families else list(FAMILIES)
    detectable = [lab.key for lab in registry.detectable()]

    fold_reports = []
    total = CountedOutcomes(0, 0, 0)
    for i, held_ids in enumerate(folds.parts):
        rest = [by_id[rid] for part_j, part in enumerate(folds.parts)
                if part_j != i for rid in part]
        if len(rest) < 2:
            raise TrainingError(f"k={args.k} leaves fold {i} with too few training reviews")
        # carve a tune split out of the training reviews for threshold/family choice
        tune_split = split_reviews(rest, (0.9, 0.1), seed=args.seed + i + 1,
                                   names=("fit", "tune"))
        fit_ids, tune_ids = tune_split.parts
        fit_ex = _examples([rec for rid in fit_ids for rec in by_review[rid]])
        tune_ex = _examples([rec for rid in tune_ids for rec in by_review[rid]])
        detector = train_detector(fit_ex, tune_ex, registry, banks,
                                  families=families, beta=args.beta, seed=args.seed)
        held = [rec for rid in held_ids for rec in by_review[rid]]
        tp = fp = fn = 0
        for rec in held:
            decided = predict(rec.vector, detector, registry).labels
            for key in detectable:
                fired, gold = key in decided, key in rec.labels
                if fired and gold:
                    tp += 1
                elif fired:
                    fp += 1
                elif gold:
                    fn += 1
        outcomes = CountedOutcomes(tp, fp, fn)
        total = total + outcomes
        p, r = precision_recall(outcomes)
        fold_reports.append({
            "name": folds.names[i],
            "family": detector.family,
            "tp": tp, "fp": fp, "fn": fn,
            "precision": p, "recall": r,
            "fbeta": f_beta(p, r, args.beta),
        })
    p, r = precision_recall(total)
    payload = {
        "beta": args.beta,
        "k": args.k,
        "seed": args.seed,
        "folds": fold_reports,
        "micro": {
            "tp": total.tp, "fp": total.fp, "fn": total.fn,
            "precision": p, "recall": r,
            "fbeta": f_beta(p, r, args.beta),
        },
        "grid": fbeta_grid(total).to_dict(),
    }
    _emit(payload, args.out)
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    records = load_corpus(args.corpus, registry)
    if (args.fractions is None) == (args.k is None):
        raise SplitError("exactly one of --fractions or --k is required")
    if args.k is not None:
        result = kfold(records, args.k, seed=args.seed)
    else:
        fractions = tuple(float(f) for f in args.fractions.split(","))
        names = tuple(args.names.split(",")) if args.names else None
        result = split_reviews(records, fractions, seed=args.seed, names=names)
    if args.out:
        result.save(args.out)
        _emit({"split": args.out, "parts": result.names,
               "distances": result.distances}, None)
    else:
        _emit(result.to_dict(), None)
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    detector = load_detector(args.detector)
    if detector.registry_version != registry.version:
        raise TrainingError(
            f"detector was trained for registry {detector.registry_version!r}, "
            f"active registry is {registry.version!r}")
    items = []
    if args.features:
        for rec in load_features(args.features):
            result = predict(rec.vector, detector, registry)
            items.append({
                "review_id": rec.review_id, "start": rec.start, "end": rec.end,
                "labels": sorted(result.labels),
                "scores": {k: result.scores[k] for k in sorted(result.scores)},
            })
    elif args.text:
        prompts = _prompts(config)
        gateway = config.gateway.build()
        for i, text in enumerate(args.text):
            seg = Segment(review_id="adhoc", start=i, end=i, text=text)
            vector = featurize(seg, detector.question_banks, registry, gateway,
                               prompts, config.gateway)
            result = predict(vector, detector, registry)
            items.append({
                "review_id": "adhoc", "start": i, "end": i, "text": text,
                "labels": sorted(result.labels),
                "scores": {k: result.scores[k] for k in sorted(result.scores)},
            })
    else:
        raise TrainingError("either --features or --text is required")
    _emit({"registry_version": detector.registry_version, "items": items}, args.out)
    return 0


def cmd_feedback(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    templates = _templates(config)
    prompts = _prompts(config)
    gateway = config.gateway.build()
    ga_config = config.ga
    if args.seed is not None:
        ga_config = replace(ga_config, seed=args.seed)
    excluded = {registry.none_key, registry.not_enough_info_key}
    review = review_from_request("adhoc", args.text, None, {
        k: v for k, v in (("abstract", args.abstract), ("summary", args.summary),
                          ("strengths", args.strengths)) if v})
    entries = []
    for key in args.label:
        label = registry.get(key)  # unknown key -> KeyError -> exit 1
        if key in excluded:
            raise TemplateError(f"no feedback is generated for label {key!r}")
        template = templates.get(key, allow_generic=config.allow_generic_template)
        evolution = run_evolution(args.text, label, template, review.context,
                                  gateway, prompts, config.gateway, ga_config)
        entry = {
            "label": key,
            "text": evolution.best.text,
            "fitness": evolution.best.fitness.to_dict(),
            "generation": evolution.best.generation,
            "parent_ids": list(evolution.best.parent_ids),
            "tie_applied": evolution.tie_applied,
        }
        if args.trace:
            entry["trace"] = evolution.to_dict()
        entries.append(entry)
    _emit({"feedback": entries}, args.out)
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    detector = load_detector(args.detector)
    if detector.registry_version != registry.version:
        raise TrainingError(
            f"detector was trained for registry {detector.registry_version!r}, "
            f"active registry is {registry.version!r}")
    settings = PipelineSettings(
        registry=registry,
        templates=_templates(config),
        prompts=_prompts(config),
        gw_config=config.gateway,
        ga_config=config.ga,
        allow_generic_template=config.allow_generic_template,
    )
    gateway = config.gateway.build()
    reviews = _load_reviews(args, registry)
    results = []
    for review in reviews:
        deadline = Deadline(config.deadline_s)
        results.append(run_pipeline(review, detector, settings, gateway, deadline))
    _emit(results[0] if args.text is not None else {"reviews": results}, args.out)
    return 0


def _load_gold(path: str, registry: LabelRegistry) -> dict[tuple[str, int, int], set[str]]:
    """Gold label sets keyed by segment, from a corpus JSONL or a features file."""
    text = Path(path).read_text(encoding="utf-8")
    gold: dict[tuple[str, int, int], set[str]] = {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict) and "items" in data:
        for rec in load_features(path):
            gold[(rec.review_id, rec.start, rec.end)] = set(rec.labels)
        return gold
    for record in load_corpus(path, registry):
        for seg in record.segments:
            gold[(record.id, seg.start, seg.end)] = set(seg.labels)
    return gold


def cmd_eval(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    gold = _load_gold(args.gold, registry)
    pred_data = json.loads(Path(args.pred).read_text(encoding="utf-8"))
    if not isinstance(pred_data, dict) or "items" not in pred_data:
        raise CorpusError(f"predictions file {args.pred} must hold an items array")
    predictions: dict[tuple[str, int, int], set[str]] = {}
    for item in pred_data["items"]:
        key = (str(item["review_id"]), int(item["start"]), int(item["end"]))
        if key not in gold:
            raise CorpusError(f"prediction for unknown segment {key}")
        predictions[key] = set(item["labels"])
    missing = sorted(k for k in gold if k not in predictions)
    if missing:
        raise CorpusError(f"missing predictions for segments: {missing[:5]}")

    detectable = [lab.key for lab in registry.detectable()]
    per_label: dict[str, CountedOutcomes] = {}
    total = CountedOutcomes(0, 0, 0)
    for key, gold_labels in gold.items():
        decided = predictions[key]
        for lab in detectable:
            fired, truth = lab in decided, lab in gold_labels
            if not fired and not truth:
                continue
            one = CountedOutcomes(tp=int(fired and truth),
                                  fp=int(fired and not truth),
                                  fn=int(truth and not fired))
            per_label[lab] = per_label.get(lab, CountedOutcomes(0, 0, 0)) + one
            total = total + one
    report = fbeta_grid(total)
    label_rows = {}
    for lab in sorted(per_label):
        p, r = precision_recall(per_label[lab])
        label_rows[lab] = {
            "tp": per_label[lab].tp, "fp": per_label[lab].fp, "fn": per_label[lab].fn,
            "precision": p, "recall": r, "fbeta": f_beta(p, r, args.beta),
        }
    p, r = precision_recall(total)
    _emit({
        "beta": args.beta,
        "micro": {"tp": total.tp, "fp": total.fp, "fn": total.fn,
                  "precision": p, "recall": r, "fbeta": f_beta(p, r, args.beta)},
        "per_label": label_rows,
        "grid": report.to_dict(),
    }, args.out)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    registry = _registry(config)
    records = load_corpus(args.corpus, registry)
    _emit(corpus_stats(records).to_dict(), args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    config = _resolve_config(args)
    serve(config, host=args.host)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lazylint",
                     description="Segment peer reviews, flag issue labels, "
                                 "and evolve guideline-aware feedback.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _common_flags(p)
        return p

    p = command("segment", "sentencize a review and tag argument segments")
    p.add_argument("--text", help="raw review text (single unnamed section)")
    p.add_argument("--in", dest="infile", help="review corpus JSONL")
    p.add_argument("--review-id", help="review id (filter for --in, id for --text)")
    p.set_defaults(func=cmd_segment)

    p = command("questions", "build per-label question banks from corpus exemplars")
    p.add_argument("--corpus", required=True, help="labeled corpus JSONL")
    p.add_argument("--n", type=int, default=10, help="questions per label")
    p.add_argument("--max-exemplars", type=int, default=5)
    p.add_argument("--generic-missing", action="store_true",
                   help="use a generic bank for labels with no exemplars")
    p.set_defaults(func=cmd_questions)

    p = command("featurize", "answer every bank question per gold segment")
    p.add_argument("--corpus", required=True, help="labeled corpus JSONL")
    p.add_argument("--banks", required=True, help="question banks JSON")
    p.set_defaults(func=cmd_featurize)

    p = command("train", "fit one-vs-rest detectors and pick the best family")
    p.add_argument("--train", required=True, help="training features JSON")
    p.add_argument("--valid", required=True, help="validation features JSON")
    p.add_argument("--banks", required=True, help="question banks JSON")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--families", help="comma-separated family subset")
    p.set_defaults(func=cmd_train)

    p = command("crossval", "k-fold cross-validation with a pooled micro report")
    p.add_argument("--corpus", required=True, help="labeled corpus JSONL")
    p.add_argument("--features", required=True, help="features JSON covering the corpus")
    p.add_argument("--banks", required=True, help="question banks JSON")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--families", help="comma-separated family subset")
    p.set_defaults(func=cmd_crossval)

    p = command("split", "cut a corpus into label-balanced parts")
    p.add_argument("--corpus", required=True, help="labeled corpus JSONL")
    p.add_argument("--fractions", help="comma-separated part sizes, e.g. 0.9,0.1")
    p.add_argument("--k", type=int, help="equal k-fold split instead of fractions")
    p.add_argument("--names", help="comma-separated part names")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = command("detect", "score segments with a trained detector")
    p.add_argument("--detector", required=True, help="detector JSON")
    p.add_argument("--features", help="precomputed features JSON (offline)")
    p.add_argument("--text", action="append", help="segment text (repeatable)")
    p.set_defaults(func=cmd_detect)

    p = command("feedback", "evolve reviewer feedback for a flagged segment")
    p.add_argument("--text", required=True, help="the flagged segment text")
    p.add_argument("--label", action="append", required=True,
                   help="issue label key (repeatable)")
    p.add_argument("--abstract", help="paper abstract for planning context")
    p.add_argument("--summary", help="reviewer summary for planning context")
    p.add_argument("--strengths", help="reviewer strengths for planning context")
    p.add_argument("--seed", type=int, help="evolution seed override")
    p.add_argument("--trace", action="store_true", help="include the full trace")
    p.set_defaults(func=cmd_feedback)

    p = command("pipeline", "segment, detect, and generate feedback in one pass")
    p.add_argument("--detector", required=True, help="detector JSON")
    p.add_argument("--text", help="raw review text (single unnamed section)")
    p.add_argument("--in", dest="infile", help="review corpus JSONL")
    p.add_argument("--review-id", help="review id (filter for --in, id for --text)")
    p.add_argument("--abstract", help="paper abstract for planning context")
    p.add_argument("--summary", help="reviewer summary for planning context")
    p.add_argument("--strengths", help="reviewer strengths for planning context")
    p.add_argument("--deadline", type=float, help="per-review deadline in seconds")
    p.set_defaults(func=cmd_pipeline)

    p = command("eval", "compare predicted label sets against gold segments")
    p.add_argument("--gold", required=True, help="corpus JSONL or features JSON")
    p.add_argument("--pred", required=True, help="detect output JSON")
    p.add_argument("--beta", type=float, default=0.5)
    p.set_defaults(func=cmd_eval)

    p = command("stats", "corpus histograms and label frequencies")
    p.add_argument("--corpus", required=True, help="labeled corpus JSONL")
    p.set_defaults(func=cmd_stats)

    p = command("serve", "run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, help="listen port")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except GatewayError as exc:
        print(f"gateway error: {exc}", file=sys.stderr)
        return 2
    except DeadlineExceeded as exc:
        print(f"deadline exceeded before {exc.stage!r} "
              f"(completed: {exc.completed})", file=sys.stderr)
        return 1
    except VALIDATION_ERRORS as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
