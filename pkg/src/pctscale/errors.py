"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures to distinct, stable process exit statuses.
"""


class PctScaleError(Exception):
    exit_code = 1


class ConfigError(PctScaleError):
    exit_code = 3


class DegenerateAnchor(PctScaleError, ValueError):
    """Conceptual or target range has zero or negative width."""

    exit_code = 10


class NonFiniteInput(PctScaleError, ValueError):
    exit_code = 11


class MissingAnchor(PctScaleError):
    exit_code = 12

    def __init__(self, variable):
        self.variable = variable
        super().__init__(f"numerical variable {variable!r} has no declared anchor")


class UnknownColumn(PctScaleError, KeyError):
    exit_code = 13

    def __init__(self, column):
        self.column = column
        super().__init__(column)

    def __str__(self):
        return f"unknown column {self.column!r}"


class UnknownCategory(PctScaleError, ValueError):
    exit_code = 14

    def __init__(self, variable, value, row=None):
        self.variable = variable
        self.value = value
        self.row = row
        where = f" (row {row})" if row is not None else ""
        super().__init__(f"value {value!r} of {variable!r}{where} is not a declared category")


class RankDeficient(PctScaleError, ValueError):
    exit_code = 20

    def __init__(self, columns):
        self.columns = tuple(columns)
        super().__init__(
            "design matrix is rank deficient; collinear column(s): " + ", ".join(self.columns)
        )


class InsufficientRows(PctScaleError, ValueError):
    exit_code = 21


class ZeroVariance(PctScaleError, ValueError):
    exit_code = 22

    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column!r} has zero variance")


class EmptyGroup(PctScaleError, ValueError):
    exit_code = 23


class TooFewPredictors(PctScaleError, ValueError):
    exit_code = 30


class MissingIv(PctScaleError, KeyError):
    exit_code = 31

    def __init__(self, iv, result_label):
        self.iv = iv
        self.result_label = result_label
        super().__init__(iv)

    def __str__(self):
        return f"result {self.result_label!r} has no predictor {self.iv!r}"


class SchemaMismatch(PctScaleError, ValueError):
    exit_code = 32


class ParseError(PctScaleError, ValueError):
    exit_code = 40

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        prefix = ", ".join(loc)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class EmptyFile(PctScaleError, ValueError):
    exit_code = 41
