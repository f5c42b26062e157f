"""Exception hierarchy shared by every stage of the pipeline."""


class ScanError(Exception):
    """Base class for all errors raised by :mod:`authornet`."""


class FormatError(ScanError):
    """A bibliographic export is structurally invalid."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class NormalizationError(ScanError, ValueError):
    """A raw author string could not be turned into an author key."""

    def __init__(self, raw, reason="no letters"):
        self.raw = raw
        super().__init__(f"cannot normalize author {raw!r}: {reason}")


class ConfigurationError(ScanError):
    """Inconsistent inputs: duplicate area names, bad manifests, missing noise model."""


class DomainError(ScanError, ValueError):
    """A numerical argument lies outside the domain of the operation."""


class UndefinedEstimateError(DomainError):
    """A requested quantity is undefined for the given inputs (e.g. empty lists, zero noise)."""


class CapacityError(ScanError):
    """An exact computation would exceed its size guard."""
