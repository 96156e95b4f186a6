"""Exception types shared across the package."""


class ModalSimError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ModalSimError):
    """Input data failed validation. Carries enough context to locate the cell."""


class MissingColumn(ValidationError):
    def __init__(self, column: str):
        super().__init__(f"required column {column!r} not found in CSV header")
        self.column = column


class BadRating(ValidationError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(
            f"row {row}, column {column!r}: {value!r} is not an integer in [0, 10]"
        )
        self.row = row
        self.column = column
        self.value = value


class BadNumeric(ValidationError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(
            f"row {row}, column {column!r}: {value!r} is not a non-negative number"
        )
        self.row = row
        self.column = column
        self.value = value


class BadMode(ValidationError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}, column {column!r}: unrecognized mode {value!r}")
        self.row = row
        self.column = column
        self.value = value


class BadGender(ValidationError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}, column {column!r}: unrecognized gender {value!r}")
        self.row = row
        self.column = column
        self.value = value


class AllModesUnavailable(ValidationError):
    def __init__(self, row: int):
        super().__init__(
            f"row {row}: all four modes marked unavailable; the decision model "
            "is undefined for such a respondent"
        )
        self.row = row


class DegeneratePriorities(ModalSimError):
    """Every unmasked criterion has zero priority, so scores are undefined."""


class MalformedDocument(ModalSimError):
    """A serialized population document could not be parsed or validated."""


class EmptyGroup(ModalSimError):
    """A statistic was requested over a group with no respondents."""


class BadConfig(ModalSimError):
    """A synthesis or scenario configuration is invalid."""


class BadSplit(ModalSimError):
    """A modal split does not describe valid fractions summing to one."""


class LengthMismatch(ModalSimError):
    """Two per-respondent sequences that must align have different lengths."""
