"""Cough-screening toolkit: TECC/MFCC front-ends, gradient-boosted-tree
back-ends, recording-level scoring, and ROC/AUC evaluation."""

from .cepstral import FeatureMatrix, FrameGrid, TeagerEnergyProfile, cmn, dct_ii, deltas, frame_average, log_compress, teo
from .errors import AudioFormatError, DataError, ManifestError
from .evaluation import (
    AveragedRoc,
    CrossValResult,
    EvalReport,
    RocCurve,
    auc,
    average_roc,
    cross_validate,
    evaluate_scores,
    roc_curve,
    specificity_at_sensitivity,
)
from .filterbank import (
    FilterbankSpec,
    GaborFilterbank,
    SubbandSignals,
    apply_filterbank,
    design_filterbank,
    hz_to_mel,
    mel_to_hz,
)
from .frontends import (
    FrontendConfig,
    TeagerSpectralDensity,
    extract_mfcc,
    extract_tecc,
    load_features,
    save_features,
    teager_spectral_density,
)
from .model import (
    ForestParams,
    GBDTModel,
    GBDTParams,
    RandomForestModel,
    RecordingScore,
    fuse_scores,
    hyperparameter_search,
    load_model,
    predict_frames,
    save_model,
    score_recording,
    train_gbdt,
    train_random_forest,
)
from .signal_io import (
    AudioBuffer,
    DatasetManifest,
    FoldAssignment,
    ManifestEntry,
    load_audio,
    load_fold_file,
    load_manifest,
    make_stratified_folds,
    save_fold_file,
    save_manifest,
    save_wav_pcm16,
)

__version__ = "0.1.0"
