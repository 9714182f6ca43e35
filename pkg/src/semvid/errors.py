"""Exception hierarchy shared by all semvid modules."""


class SemvidError(Exception):
    """Base class for all errors raised by this package."""


class EmbeddingFormatError(SemvidError):
    """Embedding file is malformed (bad header, row, or zero-norm vector)."""


class AllTokensOOV(SemvidError):
    """No token of a text could be resolved in the embedding vocabulary."""

    def __init__(self, tokens):
        self.tokens = tuple(tokens)
        super().__init__(f"all tokens out of vocabulary: {list(self.tokens)}")


class ZeroNormError(SemvidError):
    """A vector that must be normalized has zero L2 norm."""


class ConceptFormatError(SemvidError):
    """Concept repository file violates its schema."""


class NoScoreableConcepts(SemvidError):
    """Every concept in the repository is excluded from scoring."""


class IngestError(SemvidError):
    """Corpus score/transcript input violates its contract."""


class EvaluationError(SemvidError):
    """Ground truth does not support the requested metric."""
