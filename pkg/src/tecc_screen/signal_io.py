"""Audio decoding, manifest parsing, and stratified fold construction.

WAV support is deliberately narrow: RIFF/WAVE with PCM format code 1
(16-bit integer) or 3 (32-bit float), mono or stereo, little-endian.
Anything else is rejected so that decoding stays bit-exactly testable.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import AudioFormatError, DataError, ManifestError

MIN_SAMPLE_RATE_HZ = 16000

LABEL_POSITIVE = "positive"
LABEL_NEGATIVE = "negative"

_LABEL_ALIASES = {"p": LABEL_POSITIVE, "n": LABEL_NEGATIVE}

MANIFEST_COLUMNS = ("id", "path", "label", "gender", "nationality")


@dataclass(frozen=True)
class AudioBuffer:
    """Mono signal with normalized amplitude in [-1, 1]."""

    samples: np.ndarray
    sample_rate_hz: int
    source_id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise DataError(f"audio buffer {self.source_id!r} is empty")
        if not np.all(np.isfinite(samples)):
            raise DataError(f"audio buffer {self.source_id!r} has non-finite samples")
        if np.max(np.abs(samples)) > 1.0:
            raise DataError(f"audio buffer {self.source_id!r} exceeds unit amplitude")
        if self.sample_rate_hz < MIN_SAMPLE_RATE_HZ:
            raise DataError(
                f"sample rate {self.sample_rate_hz} Hz below the {MIN_SAMPLE_RATE_HZ} Hz minimum"
            )
        if samples.flags.writeable:
            if samples is self.samples:  # never flip flags on the caller's array
                samples = samples.copy()
            samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class ManifestEntry:
    recording_id: str
    audio_path: str
    label: str
    gender: str = "unknown"
    nationality: str = ""

    def __post_init__(self):
        if self.label not in (LABEL_POSITIVE, LABEL_NEGATIVE):
            raise ManifestError(
                f"recording {self.recording_id!r}: label must be "
                f"{LABEL_POSITIVE!r} or {LABEL_NEGATIVE!r}, got {self.label!r}"
            )

    @property
    def is_positive(self) -> bool:
        return self.label == LABEL_POSITIVE


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for e in self.entries:
            if e.recording_id in seen:
                raise ManifestError(f"duplicate recording id {e.recording_id!r}")
            seen.add(e.recording_id)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def labels(self) -> dict[str, str]:
        return {e.recording_id: e.label for e in self.entries}

    def count(self, label: str) -> int:
        return sum(1 for e in self.entries if e.label == label)


@dataclass(frozen=True)
class FoldAssignment:
    """Maps every recording id to a fold index in [0, k)."""

    k: int
    assignment: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 2:
            raise DataError(f"fold count must be >= 2, got {self.k}")
        for rid, fold in self.assignment.items():
            if not 0 <= fold < self.k:
                raise DataError(f"recording {rid!r} assigned to fold {fold} outside [0, {self.k})")

    def fold_ids(self, fold: int) -> list[str]:
        return sorted(rid for rid, f in self.assignment.items() if f == fold)

    def fold_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for f in self.assignment.values():
            sizes[f] += 1
        return sizes


def _read_chunks(data: bytes):
    """Yield (chunk_id, payload) pairs from a RIFF body."""
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        payload = data[pos + 8 : pos + 8 + size]
        yield cid, payload
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def load_audio(path) -> AudioBuffer:
    """Decode a PCM WAV file into a normalized mono buffer.

    16-bit samples are scaled by 1/32768; float32 samples are taken as-is
    but clipped to [-1, 1]. Stereo is mixed down by channel averaging.
    """
    path = str(path)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise AudioFormatError(f"cannot read {path}: {exc}") from exc

    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    pcm = None
    for cid, payload in _read_chunks(data):
        if cid == b"fmt " and fmt is None:
            if len(payload) < 16:
                raise AudioFormatError(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", payload, 0)
        elif cid == b"data" and pcm is None:
            pcm = payload
    if fmt is None or pcm is None:
        raise AudioFormatError(f"{path}: missing fmt or data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if channels not in (1, 2):
        raise AudioFormatError(f"{path}: {channels} channels unsupported (need 1 or 2)")
    if audio_format == 1 and bits == 16:
        raw = np.frombuffer(pcm[: len(pcm) - len(pcm) % 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif audio_format == 3 and bits == 32:
        raw = np.frombuffer(pcm[: len(pcm) - len(pcm) % 4], dtype="<f4")
        samples = np.clip(raw.astype(np.float64), -1.0, 1.0)
    else:
        raise AudioFormatError(
            f"{path}: unsupported encoding (format code {audio_format}, {bits}-bit); "
            "only 16-bit PCM and 32-bit float are accepted"
        )

    if channels == 2:
        samples = samples[: len(samples) - len(samples) % 2]
        samples = samples.reshape(-1, 2).mean(axis=1)
    if samples.size == 0:
        raise AudioFormatError(f"{path}: empty audio")
    if sample_rate < MIN_SAMPLE_RATE_HZ:
        raise DataError(
            f"{path}: sample rate {sample_rate} Hz below the {MIN_SAMPLE_RATE_HZ} Hz minimum"
        )
    return AudioBuffer(samples=samples, sample_rate_hz=int(sample_rate), source_id=path)


def save_wav_pcm16(path, samples, sample_rate_hz: int) -> None:
    """Write mono 16-bit PCM. Values are scaled by 32768 and rounded, so a
    buffer decoded by load_audio round-trips exactly."""
    samples = np.asarray(samples, dtype=np.float64)
    ints = np.clip(np.rint(samples * 32768.0), -32768, 32767).astype("<i2")
    payload = ints.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, 1, 1, sample_rate_hz, sample_rate_hz * 2, 2, 16,
        b"data", len(payload),
    )
    with open(path, "wb") as fh:
        fh.write(header + payload)


def load_manifest(path) -> DatasetManifest:
    """Parse a dataset manifest CSV with columns id,path,label,gender,nationality."""
    path = str(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in MANIFEST_COLUMNS if c not in header]
            if missing:
                raise ManifestError(f"{path}: missing required column(s) {', '.join(missing)}")
            entries = []
            for lineno, row in enumerate(reader, start=2):
                label_raw = (row["label"] or "").strip().lower()
                label = _LABEL_ALIASES.get(label_raw)
                if label is None:
                    raise ManifestError(
                        f"{path}: line {lineno}: label {row['label']!r} for id "
                        f"{row['id']!r} is not in {{p, n}}"
                    )
                entries.append(
                    ManifestEntry(
                        recording_id=row["id"].strip(),
                        audio_path=row["path"].strip(),
                        label=label,
                        gender=(row["gender"] or "unknown").strip() or "unknown",
                        nationality=(row["nationality"] or "").strip(),
                    )
                )
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    if not entries:
        raise ManifestError(f"{path}: empty manifest")
    return DatasetManifest(entries=tuple(entries))


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write a manifest back out in the format load_manifest accepts."""
    inv = {LABEL_POSITIVE: "p", LABEL_NEGATIVE: "n"}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_COLUMNS)
        for e in manifest:
            writer.writerow([e.recording_id, e.audio_path, inv[e.label], e.gender, e.nationality])


def make_stratified_folds(manifest: DatasetManifest, k: int, seed: int = 0) -> FoldAssignment:
    """Assign recordings to k folds: per-class seeded shuffle, then round-robin.

    The round-robin cursor continues from one class to the next, so both
    per-class counts and total fold sizes differ by at most 1.
    """
    if k < 2:
        raise DataError(f"fold count must be >= 2, got {k}")
    by_class: dict[str, list[str]] = {LABEL_POSITIVE: [], LABEL_NEGATIVE: []}
    for e in manifest:
        by_class[e.label].append(e.recording_id)
    for label, ids in by_class.items():
        if len(ids) < k:
            raise DataError(
                f"class {label!r} has {len(ids)} recordings, fewer than k={k}"
            )
    rng = np.random.default_rng(seed)
    assignment: dict[str, int] = {}
    cursor = 0
    for label in (LABEL_POSITIVE, LABEL_NEGATIVE):
        ids = sorted(by_class[label])
        rng.shuffle(ids)
        for rid in ids:
            assignment[rid] = cursor % k
            cursor += 1
    return FoldAssignment(k=k, assignment=assignment)


def save_fold_file(folds: FoldAssignment, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "fold"])
        for rid in sorted(folds.assignment):
            writer.writerow([rid, folds.assignment[rid]])


def load_fold_file(path) -> FoldAssignment:
    """Read an id,fold CSV, e.g. an official fold list shipped with a dataset."""
    path = str(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if not reader.fieldnames or {"id", "fold"} - set(reader.fieldnames):
                raise ManifestError(f"{path}: fold file needs columns id,fold")
            assignment = {}
            for lineno, row in enumerate(reader, start=2):
                rid = row["id"].strip()
                if rid in assignment:
                    raise ManifestError(f"{path}: line {lineno}: duplicate id {rid!r}")
                try:
                    assignment[rid] = int(row["fold"])
                except ValueError as exc:
                    raise ManifestError(
                        f"{path}: line {lineno}: fold {row['fold']!r} is not an integer"
                    ) from exc
    except OSError as exc:
        raise ManifestError(f"cannot read fold file {path}: {exc}") from exc
    if not assignment:
        raise ManifestError(f"{path}: empty fold file")
    return FoldAssignment(k=max(assignment.values()) + 1, assignment=assignment)
