"""Video evidence ingestion: pooling detector score tracks into records.

Per-frame (objects, scenes) and per-chunk (actions) detector probabilities
arrive already sampled; this module reduces each concept's track to one
video-level probability and attaches OCR/ASR transcripts. Detector
execution, frame sampling and transcript extraction all live upstream.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass

import numpy as np

from .concepts import ConceptRepository
from .errors import IngestError

log = logging.getLogger(__name__)

POOL_MODES = ("max", "avg")


@dataclass(frozen=True)
class ScoreTrack:
    """One concept's sampled detector probabilities for one video."""

    video_id: str
    concept_id: str
    samples: tuple[float, ...]

    def __post_init__(self):
        if len(self.samples) == 0:
            raise IngestError(f"empty score track for ({self.video_id}, {self.concept_id})")
        for s in self.samples:
            if not 0.0 <= s <= 1.0:
                raise IngestError(
                    f"score {s} outside [0, 1] in track ({self.video_id}, {self.concept_id})"
                )


@dataclass(frozen=True)
class VideoRecord:
    """Video-level evidence: concept probability vector plus transcripts.

    ``concept_scores`` is aligned to the repository's concept order; concepts
    without a track are zero. ``covered`` counts concepts that had one.
    """

    video_id: str
    concept_scores: np.ndarray
    ocr_text: str = ""
    asr_text: str = ""
    covered: int = 0


def pool(track: ScoreTrack, mode: str = "max") -> float:
    """Reduce a track to one probability: max or arithmetic mean."""
    if mode == "max":
        return float(max(track.samples))
    if mode == "avg":
        return float(np.mean(np.asarray(track.samples, dtype=np.float64)))
    raise ValueError(f"pool mode must be max or avg, got {mode!r}")


def build_video_record(
    tracks: list[ScoreTrack],
    repo: ConceptRepository,
    mode: str = "max",
    ocr_text: str = "",
    asr_text: str = "",
) -> VideoRecord:
    """Assemble one video's record from its score tracks."""
    if not tracks:
        raise IngestError("build_video_record needs at least one track")
    video_ids = {t.video_id for t in tracks}
    if len(video_ids) != 1:
        raise IngestError(f"tracks mix video ids: {sorted(video_ids)}")
    scores = np.zeros(len(repo), dtype=np.float64)
    seen = set()
    for track in tracks:
        if track.concept_id in seen:
            raise IngestError(
                f"duplicate track for concept {track.concept_id!r} in video {track.video_id!r}"
            )
        seen.add(track.concept_id)
        scores[repo.index_of(track.concept_id)] = pool(track, mode)
    covered = len(seen)
    if covered < len(repo):
        log.debug("video %s: %d/%d concepts covered", tracks[0].video_id, covered, len(repo))
    return VideoRecord(
        video_id=tracks[0].video_id,
        concept_scores=scores,
        ocr_text=ocr_text,
        asr_text=asr_text,
        covered=covered,
    )


def _load_score_jsonl(path, repo, mode):
    """Score JSONL: one {"video", "concept", "scores"} object per line.

    Malformed lines are reported with their line number and skipped; scores
    outside [0, 1] abort the load.
    """
    per_video: dict[str, list[ScoreTrack]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                video, concept = str(obj["video"]), str(obj["concept"])
                samples = tuple(float(s) for s in obj["scores"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                log.warning("%s line %d: malformed, skipped (%s)", path, lineno, exc)
                continue
            for s in samples:
                if not 0.0 <= s <= 1.0:
                    raise IngestError(f"{path} line {lineno}: score {s} outside [0, 1]")
            if not samples:
                log.warning("%s line %d: empty score list, skipped", path, lineno)
                continue
            track = ScoreTrack(video_id=video, concept_id=concept, samples=samples)
            if any(t.concept_id == concept for t in per_video.get(video, ())):
                raise IngestError(
                    f"{path} line {lineno}: duplicate track for ({video}, {concept})"
                )
            per_video.setdefault(video, []).append(track)
    records = {}
    for video, tracks in per_video.items():
        records[video] = build_video_record(tracks, repo, mode)
    return records


def _load_score_csv(path, repo):
    """Pre-pooled CSV: header of concept ids, one row per video."""
    records = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty pre-pooled CSV")
        columns = header[1:] if header and header[0] == "video" else header
        col_idx = [repo.index_of(c) for c in columns]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns) + 1:
                raise IngestError(
                    f"{path} line {lineno}: expected {len(columns) + 1} fields, got {len(row)}"
                )
            video = row[0]
            if video in records:
                raise IngestError(f"{path} line {lineno}: duplicate video id {video!r}")
            scores = np.zeros(len(repo), dtype=np.float64)
            for idx, raw in zip(col_idx, row[1:]):
                try:
                    value = float(raw)
                except ValueError:
                    raise IngestError(f"{path} line {lineno}: non-numeric score {raw!r}")
                if not 0.0 <= value <= 1.0:
                    raise IngestError(f"{path} line {lineno}: score {value} outside [0, 1]")
                scores[idx] = value
            records[video] = VideoRecord(
                video_id=video, concept_scores=scores, covered=len(columns)
            )
    return records


def _load_transcripts(path):
    transcripts = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                video = str(obj["video"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                log.warning("%s line %d: malformed, skipped (%s)", path, lineno, exc)
                continue
            if video in transcripts:
                raise IngestError(f"{path} line {lineno}: duplicate transcript for {video!r}")
            transcripts[video] = (str(obj.get("ocr", "")), str(obj.get("asr", "")))
    return transcripts


def load_corpus(
    score_path,
    repo: ConceptRepository,
    transcript_path=None,
    mode: str = "max",
) -> list[VideoRecord]:
    """Build one record per video appearing in either input file.

    ``score_path`` ending in ``.csv`` is treated as a pre-pooled matrix and
    bypasses pooling; anything else is score JSONL. Videos present only in
    the transcript file get an all-zero concept vector.
    """
    if str(score_path).endswith(".csv"):
        records = _load_score_csv(score_path, repo)
    else:
        records = _load_score_jsonl(score_path, repo, mode)
    transcripts = _load_transcripts(transcript_path) if transcript_path else {}

    merged = []
    for video, record in records.items():
        ocr, asr = transcripts.pop(video, ("", ""))
        merged.append(
            VideoRecord(
                video_id=video,
                concept_scores=record.concept_scores,
                ocr_text=ocr,
                asr_text=asr,
                covered=record.covered,
            )
        )
    for video, (ocr, asr) in transcripts.items():
        merged.append(
            VideoRecord(
                video_id=video,
                concept_scores=np.zeros(len(repo), dtype=np.float64),
                ocr_text=ocr,
                asr_text=asr,
                covered=0,
            )
        )
    log.info("corpus: %d videos (%d transcript-only)", len(merged), len(transcripts))
    return merged
