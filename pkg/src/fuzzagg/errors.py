"""Exception hierarchy shared by every stage of the pipeline."""


class FuzzaggError(Exception):
    """Base class; the CLI maps any of these to a nonzero exit."""

    stage = "pipeline"


class UsageError(FuzzaggError, ValueError):
    """Caller passed an empty input, a mismatched width, or the wrong operator kind."""

    stage = "usage"


class ParameterError(FuzzaggError, ValueError):
    """Operator parameter missing, unexpected, or outside the family's range."""

    stage = "operator"


class DomainError(FuzzaggError, ValueError):
    """Input outside the open unit interval for operators that divide by x or 1-x."""

    stage = "operator"


class SchemaError(FuzzaggError, ValueError):
    stage = "schema"


class DataError(FuzzaggError, ValueError):
    stage = "data"


class DegenerateAttributeError(DataError):
    """Attribute has zero observed width, so its membership is undefined."""

    stage = "fuzzify"


class LoadError(FuzzaggError, ValueError):
    stage = "load"

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class FormatError(FuzzaggError, ValueError):
    """Model or report file is truncated, has the wrong version, or names an unknown family."""

    stage = "format"
