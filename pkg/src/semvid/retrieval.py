"""Event-to-video scoring: channel scores, fusion, and ranking.

The concept channel marginalizes query-concept relevance against the
video's concept probabilities, keeping only the R most relevant concepts.
OCR and ASR channels compare the (optionally expanded) query word set with
the transcript word set. Channels are fused by a weighted geometric mean
that emphasizes the concept channel.

Every video's fused score depends only on the query, the repository and
that video's own record, never on the rest of the corpus.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .concepts import ConceptRepository, rank_concepts, top_r
from .config import DEFAULT_CONFIG, RetrievalConfig
from .embedding import EmbeddedSet, EmbeddingSpace, embed_tokens, nearest_words, sum_pool, tokenize
from .errors import AllTokensOOV, SemvidError, ZeroNormError
from .similarity import sim_crosssum
from .stopwords import DEFAULT_STOPWORDS
from .videos import VideoRecord

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EventQuery:
    """Free-text event query: title terms plus optional per-channel extras."""

    event_id: str
    title_terms: tuple[str, ...]
    ocr_terms: tuple[str, ...] = ()
    asr_terms: tuple[str, ...] = ()
    augmentation_k: int = 5

    def __post_init__(self):
        if not self.title_terms:
            raise SemvidError(f"event {self.event_id!r}: no title terms after stop-word removal")


@dataclass(frozen=True)
class ChannelScores:
    """Per-channel scores in [0, 1]; None marks an unavailable channel."""

    concept: float | None
    ocr: float | None
    asr: float | None


@dataclass(frozen=True)
class RankedList:
    event_id: str
    entries: tuple[tuple[str, float], ...]  # (video id, fused score), descending


def load_queries(path, stops=DEFAULT_STOPWORDS, augmentation_k: int = 5) -> list[EventQuery]:
    """Read a JSON array of {"event", "title", "ocr_terms"?, "asr_terms"?}."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SemvidError(f"cannot read query file {path}: {exc}")
    if not isinstance(raw, list):
        raise SemvidError("query file must be a JSON array")

    queries = []
    seen = set()
    for entry in raw:
        if not isinstance(entry, dict) or "event" not in entry or "title" not in entry:
            raise SemvidError(f"query entry missing event/title: {entry!r}")
        event_id = str(entry["event"])
        if event_id in seen:
            raise SemvidError(f"duplicate event id {event_id!r}")
        seen.add(event_id)

        def _terms(key):
            out = []
            for term in entry.get(key, ()):
                out.extend(tokenize(str(term), stops))
            return tuple(out)

        queries.append(
            EventQuery(
                event_id=event_id,
                title_terms=tuple(tokenize(str(entry["title"]), stops)),
                ocr_terms=_terms("ocr_terms"),
                asr_terms=_terms("asr_terms"),
                augmentation_k=augmentation_k,
            )
        )
    return queries


def map_cosine(value: float) -> float:
    """Affine map from [-1, 1] to [0, 1]."""
    return (value + 1.0) / 2.0


def map_concept_raw(raw: float, r: int) -> float:
    """Affine map of the concept channel's raw sum (bounded by R) to [0, 1]."""
    return (raw / r + 1.0) / 2.0


def concept_raw_score(
    query_set: EmbeddedSet,
    repo: ConceptRepository,
    video: VideoRecord,
    kernel: str = "pooled",
    r: int = 5,
    percentile: float = 50.0,
) -> float:
    """Raw marginalized relevance: sum over the R most query-relevant
    concepts of relevance weight times detection probability."""
    selected = top_r(rank_concepts(repo, query_set, kernel, percentile), r)
    raw = 0.0
    for wc in selected:
        raw += wc.weight * float(video.concept_scores[repo.index_of(wc.concept_id)])
    return raw


def score_concept_channel(
    query_set: EmbeddedSet,
    repo: ConceptRepository,
    video: VideoRecord,
    kernel: str = "pooled",
    r: int = 5,
    percentile: float = 50.0,
) -> float:
    """Concept channel score mapped to [0, 1]."""
    return map_concept_raw(concept_raw_score(query_set, repo, video, kernel, r, percentile), r)


def embed_video_fastpath(
    repo: ConceptRepository,
    video: VideoRecord,
    selected_ids,
) -> np.ndarray:
    """Collapse a video into one vector: detection-weighted sum of the
    selected concepts' unit pooled vectors.

    Its dot product with the query's unit pooled vector reproduces the raw
    pooled-kernel channel score (valid for the pooled kernel only).
    """
    psi = None
    for concept_id in selected_ids:
        cset = repo.embedded_set(concept_id)
        if cset is None:
            raise SemvidError(f"concept {concept_id!r} has no embedding")
        pooled = sum_pool(cset)
        norm = float(np.linalg.norm(pooled))
        if norm == 0.0:
            raise ZeroNormError(f"concept {concept_id!r} has a zero-norm pooled vector")
        term = (pooled / norm) * float(video.concept_scores[repo.index_of(concept_id)])
        psi = term if psi is None else psi + term
    if psi is None:
        raise SemvidError("fast path needs at least one selected concept")
    return psi


def fastpath_raw_score(
    query_set: EmbeddedSet,
    repo: ConceptRepository,
    video: VideoRecord,
    selected_ids,
) -> float:
    """Dot of the unit pooled query vector with the fast-path video vector."""
    pooled = sum_pool(query_set)
    norm = float(np.linalg.norm(pooled))
    if norm == 0.0:
        raise ZeroNormError("query has a zero-norm pooled vector")
    return float(np.dot(pooled / norm, embed_video_fastpath(repo, video, selected_ids)))


def prepare_text_query(
    terms,
    space: EmbeddingSpace,
    augmentation_k: int = 5,
) -> EmbeddedSet:
    """Embed the channel query terms, expanded with the nearest vocabulary
    words to their pooled point (the query's own tokens are excluded)."""
    base = embed_tokens(space, list(terms))
    if augmentation_k <= 0:
        return base
    exclude = set(terms) | set(base.source_tokens)
    try:
        neighbors = nearest_words(space, sum_pool(base), augmentation_k, exclude)
    except ZeroNormError:
        log.warning("text query %s pools to zero norm, skipping augmentation", list(terms))
        return base
    if not neighbors:
        return base
    extra = np.vstack([space.vector(token) for token, _ in neighbors])
    return EmbeddedSet(
        vectors=np.vstack([base.vectors, extra]),
        source_tokens=base.source_tokens + tuple(t for t, _ in neighbors),
        oov=base.oov,
        merges=base.merges,
    )


def _text_score_prepared(
    query_set: EmbeddedSet,
    transcript: str,
    space: EmbeddingSpace,
    stops=DEFAULT_STOPWORDS,
    raw_sum: bool = False,
) -> float | None:
    """Score one transcript against an already prepared query set.

    Returns None when the transcript is empty or fully out of vocabulary
    (channel unavailable).
    """
    tokens = tokenize(transcript, stops)
    if not tokens:
        return None
    try:
        tset = embed_tokens(space, tokens)
    except AllTokensOOV:
        return None
    cross = sim_crosssum(query_set, tset)
    if not raw_sum:
        cross /= len(query_set) * len(tset)  # mean pairwise cosine
    return min(max(map_cosine(cross), 0.0), 1.0)


def score_text_channel(
    query_terms,
    transcript: str,
    space: EmbeddingSpace,
    augmentation_k: int = 5,
    stops=DEFAULT_STOPWORDS,
    raw_sum: bool = False,
) -> float | None:
    """OCR/ASR channel score in [0, 1], or None when the transcript cannot
    be embedded. Raises AllTokensOOV when the query itself cannot."""
    prepared = prepare_text_query(query_terms, space, augmentation_k)
    return _text_score_prepared(prepared, transcript, space, stops, raw_sum)


def score_matching_baseline(query_terms, transcript: str, stops=DEFAULT_STOPWORDS) -> float:
    """Exact string matching: count transcript tokens equal to any query
    token. No semantics, the comparison baseline."""
    wanted = set(query_terms)
    return float(sum(1 for token in tokenize(transcript, stops) if token in wanted))


def fuse(channels: ChannelScores, w: float = 6.0) -> float:
    """Weighted geometric mean with emphasis on the concept channel:
    (pc^w * sqrt(po * pa)) ** (1 / (w + 1)).

    An unavailable channel contributes the neutral factor 0.5 (zero cosine
    evidence under the affine map).
    """
    pc = 0.5 if channels.concept is None else channels.concept
    po = 0.5 if channels.ocr is None else channels.ocr
    pa = 0.5 if channels.asr is None else channels.asr
    for value in (pc, po, pa):
        if not 0.0 <= value <= 1.0:
            raise SemvidError(f"channel score {value} outside [0, 1]")
    if pc == 0.0 or po == 0.0 or pa == 0.0:
        return 0.0
    fused = (pc**w * (po * pa) ** 0.5) ** (1.0 / (w + 1.0))
    return min(max(fused, 0.0), 1.0)


def score_channels(
    query: EventQuery,
    space: EmbeddingSpace,
    repo: ConceptRepository,
    video: VideoRecord,
    config: RetrievalConfig = DEFAULT_CONFIG,
    stops=DEFAULT_STOPWORDS,
) -> ChannelScores:
    """All three channel scores for one video (single-video convenience)."""
    query_set = embed_tokens(space, list(query.title_terms))
    concept = score_concept_channel(
        query_set, repo, video, config.kernel, config.top_r, config.percentile
    )
    ocr = score_text_channel(
        query.title_terms + query.ocr_terms, video.ocr_text, space,
        query.augmentation_k, stops, config.raw_sum_text,
    )
    asr = score_text_channel(
        query.title_terms + query.asr_terms, video.asr_text, space,
        query.augmentation_k, stops, config.raw_sum_text,
    )
    return ChannelScores(concept=concept, ocr=ocr, asr=asr)


def rank_event(
    query: EventQuery,
    space: EmbeddingSpace,
    repo: ConceptRepository,
    corpus: list[VideoRecord],
    config: RetrievalConfig = DEFAULT_CONFIG,
    stops=DEFAULT_STOPWORDS,
) -> RankedList:
    """Score every corpus video against one event and sort.

    Query-side work (concept ranking, text-query expansion) happens once;
    each video is then scored independently. A video that fails to score
    drops to the bottom with a diagnostic instead of aborting the run.
    """
    if not corpus:
        raise SemvidError("corpus is empty")
    query_set = embed_tokens(space, list(query.title_terms))

    selected = top_r(
        rank_concepts(repo, query_set, config.kernel, config.percentile), config.top_r
    )
    sel_idx = np.array([repo.index_of(wc.concept_id) for wc in selected], dtype=np.intp)
    weights = np.array([wc.weight for wc in selected], dtype=np.float64)

    ocr_query = prepare_text_query(query.title_terms + query.ocr_terms, space, query.augmentation_k)
    asr_query = prepare_text_query(query.title_terms + query.asr_terms, space, query.augmentation_k)

    sub = np.array([rec.concept_scores[sel_idx] for rec in corpus], dtype=np.float64)
    raws = kernels.marginal_scores(sub, weights)

    scored: list[tuple[str, float]] = []
    failed: list[str] = []
    for i, rec in enumerate(corpus):
        try:
            channels = ChannelScores(
                concept=map_concept_raw(float(raws[i]), config.top_r),
                ocr=_text_score_prepared(ocr_query, rec.ocr_text, space, stops, config.raw_sum_text),
                asr=_text_score_prepared(asr_query, rec.asr_text, space, stops, config.raw_sum_text),
            )
            scored.append((rec.video_id, fuse(channels, config.fusion_weight)))
        except SemvidError as exc:
            log.warning("event %s: video %s unscoreable (%s), ranked last",
                        query.event_id, rec.video_id, exc)
            failed.append(rec.video_id)
    scored.sort(key=lambda e: (-e[1], e[0]))
    entries = tuple(scored) + tuple((vid, 0.0) for vid in sorted(failed))
    return RankedList(event_id=query.event_id, entries=entries)


def rank_events(queries, space, repo, corpus, config=DEFAULT_CONFIG, stops=DEFAULT_STOPWORDS):
    return [rank_event(q, space, repo, corpus, config, stops) for q in queries]


def write_ranked_tsv(ranked_lists, fh) -> None:
    """TSV: event_id, rank, video_id, score (six decimal places)."""
    fh.write("event_id\trank\tvideo_id\tscore\n")
    for ranked in ranked_lists:
        for position, (video_id, score) in enumerate(ranked.entries, start=1):
            fh.write(f"{ranked.event_id}\t{position}\t{video_id}\t{score:.6f}\n")


def read_ranked_tsv(path) -> list[RankedList]:
    """Read the TSV back into RankedLists (entry order is authoritative)."""
    per_event: dict[str, list[tuple[str, float]]] = {}
    order: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if parts == ["event_id", "rank", "video_id", "score"]:
                continue
            if len(parts) != 4:
                raise SemvidError(f"{path} line {lineno}: expected 4 TSV columns")
            event_id, _, video_id, score = parts
            if event_id not in per_event:
                per_event[event_id] = []
                order.append(event_id)
            per_event[event_id].append((video_id, float(score)))
    return [RankedList(event_id=e, entries=tuple(per_event[e])) for e in order]
