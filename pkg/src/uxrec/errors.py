"""Exception types shared across the package.

Every error raised by uxrec derives from UxrecError so callers can catch
one base class at the service boundary. Errors that the HTTP layer maps to
structured responses carry a short machine code.
"""


class UxrecError(Exception):
    code = "error"


# corpus ---------------------------------------------------------------

class SchemaError(UxrecError):
    """A corpus file or record violates the documented schema."""

    code = "schema_error"

    def __init__(self, message, path=None, field=None):
        self.path = path
        self.field = field
        loc = "".join(p for p in (f"{path}: " if path else "", f"[{field}] " if field else ""))
        super().__init__(f"{loc}{message}")


class DanglingMetric(UxrecError):
    """A paper references a metric with no repository entry or alias."""

    code = "dangling_metric"

    def __init__(self, paper_id, metric):
        self.paper_id = paper_id
        self.metric = metric
        super().__init__(f"paper {paper_id!r} references unknown metric {metric!r}")


class EmptyField(UxrecError):
    code = "empty_field"


# embed ----------------------------------------------------------------

class EmptyText(UxrecError):
    code = "empty_text"


class ProviderUnavailable(UxrecError):
    code = "provider_unavailable"


class ZeroVector(UxrecError):
    code = "zero_vector"


class DimMismatch(UxrecError):
    code = "dim_mismatch"


class EmptyIndex(UxrecError):
    code = "empty_index"


# graph ----------------------------------------------------------------

class MissingCategorySimilarity(UxrecError):
    code = "missing_category_similarity"


class PartitionMismatch(UxrecError):
    code = "partition_mismatch"


class UnknownCommunity(UxrecError):
    code = "unknown_community"


# llm ------------------------------------------------------------------

class LlmUnavailable(UxrecError):
    code = "llm_unavailable"


class UnparseableLlmOutput(UxrecError):
    code = "unparseable_llm_output"


class MockScriptMiss(LlmUnavailable):
    """The scripted mock has no entry for the requested stage+input key."""

    code = "mock_script_miss"

    def __init__(self, key, known):
        self.key = key
        super().__init__(
            f"mock script has no entry for key {key!r}; known keys: {sorted(known)}"
        )


# evalharness ----------------------------------------------------------

class EmptyTruth(UxrecError):
    code = "empty_truth"


class LengthMismatch(UxrecError):
    code = "length_mismatch"


class DegenerateSample(UxrecError):
    code = "degenerate_sample"


class DegenerateVariance(UxrecError):
    code = "degenerate_variance"


# service --------------------------------------------------------------

class ValidationError(UxrecError):
    code = "validation_error"


class NotFound(UxrecError):
    code = "not_found"


class UnknownMetric(UxrecError):
    code = "unknown_metric"


class EmptyCart(UxrecError):
    code = "empty_cart"


class StageFailed(UxrecError):
    """Wraps a pipeline error with the stage it occurred in."""

    code = "stage_failed"

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage} failed: {cause}")
