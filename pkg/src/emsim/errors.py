"""Exception types shared across the simulator."""


class DomainError(ValueError):
    """An argument lies outside the domain of a physical-layer function."""


class ScenarioError(Exception):
    """The generated scenario cannot be evaluated (no relay, isolated cluster)."""


class NoRelayCandidateError(ScenarioError):
    def __init__(self, message: str = "no relay candidate"):
        super().__init__(message)


class ClusterIsolatedError(ScenarioError):
    """No cluster node has residual energy above the election threshold."""

    def __init__(self, message: str = "cluster isolated", cluster: int | None = None):
        super().__init__(message)
        self.cluster = cluster


class ConfigError(ValueError):
    """Configuration failed validation; ``key`` names the offending entry."""

    def __init__(self, key: str, constraint: str):
        super().__init__(f"{key}: {constraint}")
        self.key = key
        self.constraint = constraint
