"""Command-line entry point.

One subcommand per pipeline stage: extract, train, predict, evaluate,
fuse, crossval, search. Outputs are written atomically (temp file then
rename); exit status is 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import evaluation, frontends, model, plots, signal_io
from .errors import DataError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _atomic(save, path) -> None:
    """Run save(tmp_path) then rename, so failed runs leave no partial file.

    The temp name keeps the real suffix last (renderers pick the format
    from the extension)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.stem + ".tmp" + path.suffix)
    try:
        save(tmp)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _jobs_from(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("TECC_SCREEN_JOBS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise UsageError(f"TECC_SCREEN_JOBS={env!r} is not an integer") from None


def _frontend_from(args) -> frontends.FrontendConfig:
    overrides = {}
    for flag, key in (
        ("num_filters", "num_filters"),
        ("num_ceps", "num_ceps"),
        ("fmin", "fmin_hz"),
        ("fmax", "fmax_hz"),
        ("window_ms", "window_ms"),
        ("hop_ms", "hop_ms"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "no_deltas", False):
        overrides["add_deltas"] = False
    if getattr(args, "no_cmn", False):
        overrides["apply_cmn"] = False
    return frontends.FrontendConfig.default(args.frontend, **overrides)


def _gbdt_params_from(args) -> model.GBDTParams:
    params = model.GBDTParams()
    kw = {}
    if getattr(args, "trees", None) is not None:
        kw["num_trees"] = args.trees
    if getattr(args, "learning_rate", None) is not None:
        kw["learning_rate"] = args.learning_rate
    if getattr(args, "max_leaves", None) is not None:
        kw["max_leaves"] = args.max_leaves
    if getattr(args, "min_samples_leaf", None) is not None:
        kw["min_samples_leaf"] = args.min_samples_leaf
    if getattr(args, "pos_weight", None) is not None:
        kw["pos_weight"] = args.pos_weight
    if getattr(args, "seed", None) is not None:
        kw["seed"] = args.seed
    return params.replace(**kw)


def _forest_params_from(args) -> model.ForestParams:
    return model.ForestParams(
        num_trees=args.trees if getattr(args, "trees", None) is not None else 100,
        seed=args.seed if getattr(args, "seed", None) is not None else 0,
    )


def _resolve_audio_paths(manifest, manifest_path) -> list[tuple[str, str]]:
    base = Path(manifest_path).resolve().parent
    tasks = []
    for entry in manifest:
        p = Path(entry.audio_path)
        if not p.is_absolute():
            p = base / p
        if not p.is_file():
            raise DataError(f"audio file for {entry.recording_id!r} not found: {p}")
        tasks.append((entry.recording_id, str(p)))
    return tasks


def _load_feature_dir(features_dir, manifest) -> dict[str, frontends.FeatureMatrix]:
    out = {}
    root = Path(features_dir)
    for entry in manifest:
        path = root / f"{entry.recording_id}.fea1"
        if not path.is_file():
            raise DataError(f"missing feature file for {entry.recording_id!r}: {path}")
        out[entry.recording_id] = frontends.load_features(path, entry.recording_id)
    return out


def _extract_all(manifest, manifest_path, cfg, jobs) -> dict[str, frontends.FeatureMatrix]:
    tasks = _resolve_audio_paths(manifest, manifest_path)
    mats = frontends.extract_batch(tasks, cfg, jobs=jobs)
    return {rid: m for (rid, _), m in zip(tasks, mats)}


def _folds_from(args, manifest) -> signal_io.FoldAssignment:
    if getattr(args, "fold_file", None):
        folds = signal_io.load_fold_file(args.fold_file)
        known = {e.recording_id for e in manifest}
        missing = [rid for rid in known if rid not in folds.assignment]
        if missing:
            raise DataError(f"fold file lacks assignments for {missing[:3]}")
        return folds
    k = args.folds if getattr(args, "folds", None) is not None else 5
    return signal_io.make_stratified_folds(manifest, k, seed=args.seed or 0)


# ---------------------------------------------------------------------------
# Commands


def _cmd_extract(args) -> int:
    manifest = signal_io.load_manifest(args.manifest)
    cfg = _frontend_from(args)
    jobs = _jobs_from(args)
    tasks = _resolve_audio_paths(manifest, args.manifest)
    out_dir = Path(args.out)
    mats = frontends.extract_batch(tasks, cfg, jobs=jobs)
    for (rid, _), m in zip(tasks, mats):
        if args.format == "csv":
            _atomic(lambda p, m=m: frontends.save_features_csv(m, p), out_dir / f"{rid}.csv")
        else:
            _atomic(lambda p, m=m: frontends.save_features(m, p), out_dir / f"{rid}.fea1")
    if args.spectral_density:
        if cfg.kind != "tecc":
            raise UsageError("--spectral-density requires the tecc frontend")
        dens_dir = Path(args.spectral_density)
        for rid, path in tasks:
            buffer = signal_io.load_audio(path)
            density = frontends.teager_spectral_density(buffer, cfg)
            _atomic(
                lambda p, d=density: frontends.save_spectral_density_csv(d, p),
                dens_dir / f"{rid}_density.csv",
            )
            _atomic(
                lambda p, d=density, rid=rid: plots.save_density_png(d, p, title=rid),
                dens_dir / f"{rid}_density.png",
            )
    print(f"extracted {len(mats)} recordings -> {out_dir}")
    return 0


def _cmd_train(args) -> int:
    manifest = signal_io.load_manifest(args.manifest)
    features = _load_feature_dir(args.features, manifest)
    labels = evaluation.binary_labels(manifest.labels)
    X, y = model.stack_frames((features[e.recording_id], labels[e.recording_id]) for e in manifest)
    if args.backend == "rf":
        trained = model.train_random_forest(X, y, _forest_params_from(args))
    else:
        trained = model.train_gbdt(X, y, _gbdt_params_from(args))
    _atomic(lambda p: model.save_model(trained, p), args.model)
    print(f"trained {args.backend} on {X.shape[0]} frames -> {args.model}")
    return 0


def _cmd_predict(args) -> int:
    manifest = signal_io.load_manifest(args.manifest)
    features = _load_feature_dir(args.features, manifest)
    trained = model.load_model(args.model)
    scores = {}
    for entry in manifest:
        probs = model.predict_frames(trained, features[entry.recording_id])
        scores[entry.recording_id] = model.score_recording(probs, entry.recording_id).score
    _atomic(lambda p: model.save_scores(scores, p), args.scores)
    print(f"scored {len(scores)} recordings -> {args.scores}")
    return 0


def _cmd_evaluate(args) -> int:
    manifest = signal_io.load_manifest(args.manifest)
    scores = model.load_scores(args.scores)
    missing = [e.recording_id for e in manifest if e.recording_id not in scores]
    if missing:
        raise DataError(f"scores file omits id(s): {', '.join(missing[:5])}")
    subset = {e.recording_id: scores[e.recording_id] for e in manifest}
    report, curve = evaluation.evaluate_scores(
        subset, manifest.labels, args.target_sensitivity
    )
    sys.stdout.write(evaluation.format_report(report))
    if args.out:
        out = Path(args.out)
        _atomic(lambda p: Path(p).write_text(evaluation.format_report(report)), out / "report.txt")
        _atomic(lambda p: evaluation.save_roc_csv(curve, p), out / "roc.csv")
        _atomic(lambda p: plots.save_single_roc_png(curve, p, title="ROC"), out / "roc.png")
    return 0


def _cmd_fuse(args) -> int:
    systems = [model.load_scores(p) for p in args.scores]
    if len(systems) < 2:
        raise UsageError("fuse needs at least two --scores files")
    weights = None
    if args.weights:
        try:
            weights = [float(w) for w in args.weights.split(",")]
        except ValueError:
            raise UsageError(f"--weights {args.weights!r} is not a comma-separated number list")
    fused = model.fuse_scores(systems, weights)
    _atomic(lambda p: model.save_scores(fused, p), args.out)
    print(f"fused {len(systems)} systems -> {args.out}")
    return 0


def _run_crossval(args):
    manifest = signal_io.load_manifest(args.manifest)
    folds = _folds_from(args, manifest)
    if args.features:
        features = _load_feature_dir(args.features, manifest)
    else:
        features = _extract_all(manifest, args.manifest, _frontend_from(args), _jobs_from(args))
    if args.backend == "rf":
        params = _forest_params_from(args)
    else:
        params = _gbdt_params_from(args)
    result = evaluation.cross_validate(
        features,
        manifest.labels,
        folds,
        params=params,
        backend=args.backend,
        target_sensitivity=args.target_sensitivity,
        jobs=_jobs_from(args),
    )
    return manifest, folds, features, result


def _cmd_crossval(args) -> int:
    _, folds, _, result = _run_crossval(args)
    out = Path(args.out)
    _atomic(lambda p: model.save_scores(result.pooled_scores, p), out / "scores.csv")
    _atomic(lambda p: signal_io.save_fold_file(folds, p), out / "folds.csv")
    _atomic(lambda p: evaluation.save_fold_auc_csv(result.report, p), out / "report.csv")
    _atomic(
        lambda p: Path(p).write_text(evaluation.format_report(result.report)),
        out / "report.txt",
    )
    for i, curve in enumerate(result.fold_curves):
        _atomic(lambda p, c=curve: evaluation.save_roc_csv(c, p), out / f"roc_fold{i}.csv")
    if result.average_curve is not None:
        _atomic(
            lambda p: evaluation.save_average_roc_csv(result.average_curve, p),
            out / "roc_mean.csv",
        )
        _atomic(lambda p: plots.save_roc_svg(result.average_curve, p), out / "roc.svg")
        _atomic(
            lambda p: plots.save_roc_png(result.average_curve, p, result.fold_curves),
            out / "roc.png",
        )
    sys.stdout.write(evaluation.format_report(result.report))
    return 0


def _cmd_search(args) -> int:
    manifest = signal_io.load_manifest(args.manifest)
    folds = _folds_from(args, manifest)
    if args.features:
        features = _load_feature_dir(args.features, manifest)
    else:
        features = _extract_all(manifest, args.manifest, _frontend_from(args), _jobs_from(args))
    labels = evaluation.binary_labels(manifest.labels)
    space = dict(model.DEFAULT_SEARCH_SPACE)
    if args.trees is not None:
        space["num_trees"] = [args.trees]
    best, trials = model.hyperparameter_search(
        space, features, labels, folds, budget=args.budget, seed=args.seed or 0
    )

    def write_trials(path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write("trial,num_trees,learning_rate,max_leaves,min_samples_leaf,mean_auc,fold_aucs\n")
            for t in trials:
                p = t["params"]
                fold_str = ";".join(f"{a:.6f}" for a in t["fold_aucs"])
                fh.write(
                    f"{t['trial']},{p.num_trees},{p.learning_rate:.6g},{p.max_leaves},"
                    f"{p.min_samples_leaf},{t['mean_auc']:.6f},{fold_str}\n"
                )

    _atomic(write_trials, args.out)
    print(
        f"best mean CV AUC {max(t['mean_auc'] for t in trials):.4f} with "
        f"learning_rate={best.learning_rate:.6g} max_leaves={best.max_leaves} "
        f"min_samples_leaf={best.min_samples_leaf} num_trees={best.num_trees}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_frontend_flags(p):
    p.add_argument("--frontend", choices=("tecc", "mfcc"), default="tecc")
    p.add_argument("--num-filters", type=int, dest="num_filters")
    p.add_argument("--num-ceps", type=int, dest="num_ceps")
    p.add_argument("--fmin", type=float)
    p.add_argument("--fmax", type=float)
    p.add_argument("--window-ms", type=float, dest="window_ms")
    p.add_argument("--hop-ms", type=float, dest="hop_ms")
    p.add_argument("--no-deltas", action="store_true", dest="no_deltas")
    p.add_argument("--no-cmn", action="store_true", dest="no_cmn")


def _add_model_flags(p):
    p.add_argument("--backend", choices=("gbdt", "rf"), default="gbdt")
    p.add_argument("--trees", type=int)
    p.add_argument("--learning-rate", type=float, dest="learning_rate")
    p.add_argument("--max-leaves", type=int, dest="max_leaves")
    p.add_argument("--min-samples-leaf", type=int, dest="min_samples_leaf")
    p.add_argument("--pos-weight", type=float, dest="pos_weight")


def build_parser() -> _Parser:
    parser = _Parser(prog="tecc-screen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="extract features for every manifest row")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory for feature files")
    p.add_argument("--format", choices=("fea1", "csv"), default="fea1")
    p.add_argument("--spectral-density", dest="spectral_density",
                   help="also write per-recording Teager spectral density CSV/PNG here")
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int, default=0)
    _add_frontend_flags(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("train", help="train a classifier on extracted features")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True, help="directory of .fea1 files")
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--seed", type=int, default=0)
    _add_model_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="score recordings with a trained model")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--scores", required=True, help="output scores CSV")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="ROC/AUC report for a scores file")
    p.add_argument("--scores", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--target-sensitivity", type=float, dest="target_sensitivity",
                   default=evaluation.DEFAULT_TARGET_SENSITIVITY)
    p.add_argument("--out", help="optional report directory")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("fuse", help="weighted score-level fusion of systems")
    p.add_argument("--scores", action="append", required=True,
                   help="scores CSV (repeat per system)")
    p.add_argument("--weights", help="comma-separated non-negative weights")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("crossval", help="k-fold cross-validation from audio")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--folds", type=int)
    p.add_argument("--fold-file", dest="fold_file")
    p.add_argument("--features", help="reuse cached .fea1 files instead of extracting")
    p.add_argument("--target-sensitivity", type=float, dest="target_sensitivity",
                   default=evaluation.DEFAULT_TARGET_SENSITIVITY)
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int, default=0)
    _add_frontend_flags(p)
    _add_model_flags(p)
    p.set_defaults(func=_cmd_crossval)

    p = sub.add_parser("search", help="seeded random hyper-parameter search")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output trials CSV")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--folds", type=int)
    p.add_argument("--fold-file", dest="fold_file")
    p.add_argument("--features")
    p.add_argument("--trees", type=int, help="pin the tree count during the search")
    p.add_argument("--jobs", type=int)
    p.add_argument("--seed", type=int, default=0)
    _add_frontend_flags(p)
    p.set_defaults(func=_cmd_search)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
