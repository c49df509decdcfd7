"""Exception hierarchy shared by all cosmos modules."""

from __future__ import annotations


class CosmosError(Exception):
    """Base class for every error raised by this package."""


# --- catalog validation -------------------------------------------------

class SchemaError(CosmosError):
    """A document is missing required content or carries unknown fields."""


class UnitError(CosmosError):
    """Illegal driver/unit pairing or unsupported rate scale."""


class DuplicateIdError(CosmosError):
    """Two components in one catalog share an id."""


class NegativeRateError(CosmosError, ValueError):
    """A price or quantity that must be nonnegative is negative."""


# --- workflow validation ------------------------------------------------

class CycleError(CosmosError):
    """The workflow edge relation contains a cycle."""


class UnknownFunctionError(CosmosError):
    """An edge or placement references a function that is not declared."""


class UnknownPlatformError(CosmosError):
    """A placement or flag references a platform with no loaded catalog."""


class MissingLatencyError(CosmosError):
    """A required (function, platform) latency entry is absent."""

    def __init__(self, function_id: str, platform_id: str):
        self.function_id = function_id
        self.platform_id = platform_id
        super().__init__(f"no latency entry for ({function_id}, {platform_id})")


# --- cost computation ---------------------------------------------------

class DomainError(CosmosError):
    """A cost operation received an input outside its domain."""


class UnknownComponentError(CosmosError):
    """A profile references a component id absent from the active catalog."""


class UnplacedFunctionError(CosmosError):
    """A placement does not assign a platform to every workflow function."""


# --- optimization -------------------------------------------------------

class CapExceededError(CosmosError):
    """Exhaustive enumeration would exceed the configured cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"enumeration would generate {count} placements (cap {cap})")


class DegenerateAnchorError(CosmosError):
    """An anchor minimum is zero, so its reciprocal weight is undefined."""


class InfeasibleError(CosmosError):
    """No placement satisfies both the budget and the latency constraint."""

    def __init__(self, c_star, t_star, budget=None, latency_slo=None, diagnostics=None):
        self.c_star = c_star
        self.t_star = t_star
        self.budget = budget
        self.latency_slo = latency_slo
        self.diagnostics = dict(diagnostics or {})
        parts = [f"minimum achievable cost C*={c_star}", f"minimum achievable latency T*={t_star}"]
        if budget is not None:
            parts.append(f"budget={budget}")
        if latency_slo is not None:
            parts.append(f"latency_slo={latency_slo}")
        super().__init__("no feasible placement: " + ", ".join(parts))


# --- telemetry ----------------------------------------------------------

class HeaderError(CosmosError):
    """Usage-log header row does not match the declared schema."""


class RowError(CosmosError):
    """One usage-log row is malformed."""

    def __init__(self, line: int, cause: str):
        self.line = line
        self.cause = cause
        super().__init__(f"row {line}: {cause}")


class NoDataError(CosmosError):
    """No matching ok-status records for the requested aggregation."""


class CoverageError(CosmosError):
    """Calibration statistics do not cover every required pair."""

    def __init__(self, missing):
        self.missing = tuple(missing)
        pairs = ", ".join(f"({f}, {p})" for f, p in self.missing)
        super().__init__(f"missing statistics for: {pairs}")
