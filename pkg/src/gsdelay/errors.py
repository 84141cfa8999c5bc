"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A rejected input: bad parameter range, malformed scenario, impossible design."""


class SolveError(RuntimeError):
    """A numerical solve failed (root not bracketed, power unattainable)."""


class ScenarioError(ConfigError):
    """A scenario file problem, carrying the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
