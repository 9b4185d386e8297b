"""ROC/AUC metrics, fixed-sensitivity operating points, and k-fold CV.

Scores are recording-level probabilities; labels are positive/negative.
Ties share a single threshold point, so the trapezoidal area equals the
Mann-Whitney statistic with ties counted 1/2.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cepstral import FeatureMatrix
from .errors import DataError
from .model import (
    ForestParams,
    GBDTParams,
    score_recording,
    stack_frames,
    train_gbdt,
    train_random_forest,
)
from .signal_io import LABEL_POSITIVE, FoldAssignment

DEFAULT_TARGET_SENSITIVITY = 0.8049  # default fixed-sensitivity operating point

FPR_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class RocCurve:
    """Ordered (threshold, fpr, tpr) points from +inf down to -inf."""

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray

    def __len__(self) -> int:
        return len(self.thresholds)


@dataclass(frozen=True)
class AveragedRoc:
    fpr_grid: np.ndarray
    mean_tpr: np.ndarray
    stderr_tpr: np.ndarray


@dataclass(frozen=True)
class EvalReport:
    auc: float
    sensitivity_target: float
    specificity_at_target: float
    threshold_at_target: float
    num_pos: int
    num_neg: int
    per_fold_auc: tuple[float, ...] = ()
    fold_auc_mean: float | None = None
    fold_auc_stderr: float | None = None


@dataclass(frozen=True)
class CrossValResult:
    report: EvalReport
    fold_curves: tuple[RocCurve, ...]
    pooled_scores: dict[str, float]
    pooled_curve: RocCurve
    average_curve: AveragedRoc | None


def binary_labels(labels: dict[str, str | int]) -> dict[str, int]:
    """Normalize positive/negative (or 0/1) label maps to ints."""
    out = {}
    for rid, label in labels.items():
        if label in (0, 1):
            out[rid] = int(label)
        else:
            out[rid] = 1 if label == LABEL_POSITIVE else 0
    return out


def roc_curve(scores: dict[str, float], labels: dict[str, str | int]) -> RocCurve:
    """ROC points at every distinct score, plus +/-inf sentinels."""
    if set(scores) != set(labels):
        missing = set(scores).symmetric_difference(labels)
        raise DataError(f"score/label id mismatch (e.g. {sorted(missing)[:3]})")
    ids = sorted(scores)
    y = np.array([binary_labels(labels)[rid] for rid in ids])
    s = np.array([float(scores[rid]) for rid in ids])
    num_pos = int(y.sum())
    num_neg = int(y.size - num_pos)
    if num_pos == 0 or num_neg == 0:
        raise DataError("ROC needs at least one positive and one negative")

    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    distinct = np.nonzero(np.diff(s))[0]
    cut = np.concatenate([distinct, [s.size - 1]])  # last index of each tie group
    tp = np.cumsum(y)[cut]
    fp = np.cumsum(1 - y)[cut]
    thresholds = np.concatenate([[np.inf], s[cut], [-np.inf]])
    fpr = np.concatenate([[0.0], fp / num_neg, [1.0]])
    tpr = np.concatenate([[0.0], tp / num_pos, [1.0]])
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area; equals Mann-Whitney with ties counted 1/2."""
    return float(np.trapezoid(curve.tpr, curve.fpr))


def auc_mann_whitney(scores: dict[str, float], labels: dict[str, str | int]) -> float:
    """Brute-force pairwise statistic; the independent check for auc()."""
    lab = binary_labels(labels)
    pos = [scores[r] for r in scores if lab[r] == 1]
    neg = [scores[r] for r in scores if lab[r] == 0]
    if not pos or not neg:
        raise DataError("Mann-Whitney needs both classes")
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def specificity_at_sensitivity(
    curve: RocCurve, target_tpr: float = DEFAULT_TARGET_SENSITIVITY
) -> tuple[float, float]:
    """Max specificity (= 1 - fpr) among thresholds with tpr >= target."""
    if not 0 < target_tpr <= 1:
        raise DataError(f"target sensitivity must be in (0, 1], got {target_tpr}")
    reachable = np.nonzero(curve.tpr >= target_tpr)[0]
    i = reachable[0]  # fpr is non-decreasing, so the first hit maximizes specificity
    return float(1.0 - curve.fpr[i]), float(curve.thresholds[i])


def average_roc(curves, fpr_grid: np.ndarray | None = None) -> AveragedRoc:
    """Vertical averaging: interpolate each curve's tpr onto a fixed fpr grid."""
    curves = list(curves)
    if len(curves) < 2:
        raise DataError(f"need at least 2 curves to average, got {len(curves)}")
    grid = FPR_GRID if fpr_grid is None else np.asarray(fpr_grid, dtype=np.float64)
    stack = np.stack([_interp_tpr(c, grid) for c in curves])
    mean = stack.mean(axis=0)
    stderr = stack.std(axis=0, ddof=1) / np.sqrt(len(curves))
    return AveragedRoc(fpr_grid=grid, mean_tpr=mean, stderr_tpr=stderr)


def _interp_tpr(curve: RocCurve, grid: np.ndarray) -> np.ndarray:
    # collapse vertical segments: keep the max tpr at each distinct fpr
    fpr, tpr = curve.fpr, curve.tpr
    keep_fpr, keep_tpr = [], []
    for x, t in zip(fpr, tpr):
        if keep_fpr and keep_fpr[-1] == x:
            keep_tpr[-1] = max(keep_tpr[-1], t)
        else:
            keep_fpr.append(x)
            keep_tpr.append(t)
    return np.interp(grid, np.array(keep_fpr), np.array(keep_tpr))


def standard_error(values) -> float:
    values = np.asarray(values, dtype=np.float64)
    return float(values.std(ddof=1) / np.sqrt(values.size))


def _train_backend(X, y, params, backend: str):
    if backend == "gbdt":
        if params is not None and not isinstance(params, GBDTParams):
            raise DataError("gbdt backend needs GBDTParams")
        return train_gbdt(X, y, params)
    if backend == "rf":
        if params is not None and not isinstance(params, ForestParams):
            raise DataError("rf backend needs ForestParams")
        return train_random_forest(X, y, params)
    raise DataError(f"unknown backend {backend!r} (expected gbdt or rf)")


def evaluate_scores(
    scores: dict[str, float],
    labels: dict[str, str | int],
    target_sensitivity: float = DEFAULT_TARGET_SENSITIVITY,
) -> tuple[EvalReport, RocCurve]:
    curve = roc_curve(scores, labels)
    spec, thr = specificity_at_sensitivity(curve, target_sensitivity)
    lab = binary_labels(labels)
    num_pos = sum(lab.values())
    report = EvalReport(
        auc=auc(curve),
        sensitivity_target=target_sensitivity,
        specificity_at_target=spec,
        threshold_at_target=thr,
        num_pos=num_pos,
        num_neg=len(lab) - num_pos,
    )
    return report, curve


def _run_fold(task):
    features, lab, train_ids, val_ids, params, backend = task
    X, y = stack_frames((features[rid], lab[rid]) for rid in train_ids)
    model = _train_backend(X, y, params, backend)
    fold_scores = {}
    for rid in val_ids:
        probs = model.predict_proba(features[rid].data)
        fold_scores[rid] = score_recording(probs, rid).score
    return fold_scores, roc_curve(fold_scores, {rid: lab[rid] for rid in val_ids})


def cross_validate(
    features: dict[str, FeatureMatrix],
    labels: dict[str, str | int],
    folds: FoldAssignment,
    params: GBDTParams | ForestParams | None = None,
    backend: str | None = None,
    target_sensitivity: float = DEFAULT_TARGET_SENSITIVITY,
    jobs: int = 1,
) -> CrossValResult:
    """Train on k-1 folds, score the held-out fold, aggregate AUCs.

    Every recording in `folds` must have features and a label; each
    validation fold must contain both classes. Fold jobs are independent,
    so jobs > 1 trains them in a process pool; results are reduced in fold
    order either way and are identical to the serial run.
    """
    lab = binary_labels(labels)
    missing = [rid for rid in folds.assignment if rid not in features or rid not in lab]
    if missing:
        raise DataError(f"folds reference recordings without features (e.g. {missing[:3]})")
    if backend is None:
        backend = "rf" if isinstance(params, ForestParams) else "gbdt"

    tasks = []
    for fold in range(folds.k):
        train_ids = [rid for rid in sorted(folds.assignment) if folds.assignment[rid] != fold]
        val_ids = folds.fold_ids(fold)
        if not val_ids:
            raise DataError(f"fold {fold} is empty")
        if len({lab[rid] for rid in val_ids}) < 2:
            raise DataError(f"fold {fold} contains a single class")
        tasks.append((features, lab, train_ids, val_ids, params, backend))

    if jobs > 1 and folds.k > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, folds.k)) as pool:
            outcomes = list(pool.map(_run_fold, tasks))
    else:
        outcomes = [_run_fold(t) for t in tasks]

    fold_aucs = []
    fold_curves = []
    pooled: dict[str, float] = {}
    for fold_scores, curve in outcomes:
        fold_curves.append(curve)
        fold_aucs.append(auc(curve))
        pooled.update(fold_scores)

    pooled_report, pooled_curve = evaluate_scores(pooled, lab, target_sensitivity)
    report = EvalReport(
        auc=pooled_report.auc,
        sensitivity_target=pooled_report.sensitivity_target,
        specificity_at_target=pooled_report.specificity_at_target,
        threshold_at_target=pooled_report.threshold_at_target,
        num_pos=pooled_report.num_pos,
        num_neg=pooled_report.num_neg,
        per_fold_auc=tuple(fold_aucs),
        fold_auc_mean=float(np.mean(fold_aucs)),
        fold_auc_stderr=standard_error(fold_aucs),
    )
    avg = average_roc(fold_curves) if len(fold_curves) >= 2 else None
    return CrossValResult(
        report=report,
        fold_curves=tuple(fold_curves),
        pooled_scores=pooled,
        pooled_curve=pooled_curve,
        average_curve=avg,
    )


# ---------------------------------------------------------------------------
# Report emission


def save_roc_csv(curve: RocCurve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("fpr,tpr,threshold\n")
        for thr, fpr, tpr in zip(curve.thresholds, curve.fpr, curve.tpr):
            fh.write(f"{fpr:.17g},{tpr:.17g},{thr:.17g}\n")


def save_average_roc_csv(avg: AveragedRoc, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("fpr,mean_tpr,stderr_tpr\n")
        for f, m, s in zip(avg.fpr_grid, avg.mean_tpr, avg.stderr_tpr):
            fh.write(f"{f:.17g},{m:.17g},{s:.17g}\n")


def save_fold_auc_csv(report: EvalReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("fold,auc\n")
        for i, a in enumerate(report.per_fold_auc):
            fh.write(f"{i},{a:.17g}\n")
        if report.fold_auc_mean is not None:
            fh.write(f"mean,{report.fold_auc_mean:.17g}\n")
            fh.write(f"stderr,{report.fold_auc_stderr:.17g}\n")


def format_report(report: EvalReport) -> str:
    lines = [
        f"recordings: {report.num_pos} positive, {report.num_neg} negative",
        f"AUC (pooled scores): {report.auc:.4f}",
        f"specificity at sensitivity >= {report.sensitivity_target:.4f}: "
        f"{report.specificity_at_target:.4f} (threshold {report.threshold_at_target:.6g})",
    ]
    if report.per_fold_auc:
        folds = ", ".join(f"{a:.4f}" for a in report.per_fold_auc)
        lines.append(f"per-fold AUC: {folds}")
        lines.append(
            f"mean fold AUC: {report.fold_auc_mean:.4f} "
            f"+/- {report.fold_auc_stderr:.4f} (standard error)"
        )
    return "\n".join(lines) + "\n"
