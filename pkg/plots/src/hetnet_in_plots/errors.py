"""Error taxonomy for the plotting package."""


class PlotsError(Exception):
    """Base class for all plotting errors."""


class ConfigError(PlotsError):
    """Invalid or unreadable plot spec."""


class MissingColumn(PlotsError):
    """Input CSV lacks a column the figure kind requires."""

    def __init__(self, column: str, path: str):
        self.column = column
        super().__init__(f"column {column!r} missing from {path}")


class EmptyInput(PlotsError):
    """Input CSV has a header but no data rows."""
