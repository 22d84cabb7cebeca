"""Exception hierarchy. The CLI maps these onto exit codes."""


class LeginetError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(LeginetError):
    """Bad configuration, missing input files or unreadable rules."""

    exit_code = 1


class DataIntegrityError(LeginetError):
    """Inputs that parse but contradict each other (duplicate titles, bad annotations)."""

    exit_code = 2


class MissingArtifactError(ConfigError):
    """An upstream pipeline stage has not been run yet."""

    def __init__(self, path, stage):
        super().__init__(f"missing artifact {path}; run the '{stage}' stage first")
        self.path = path
        self.stage = stage


class ConvergenceError(LeginetError):
    pass
