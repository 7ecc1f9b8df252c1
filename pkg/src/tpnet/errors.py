"""Exception types raised by tpnet."""


class TPNetError(Exception):
    """Base class for all tpnet errors."""


class InvalidSpecError(TPNetError, ValueError):
    pass


class ShapeError(TPNetError, ValueError):
    pass


class NumericOverflowError(TPNetError, ArithmeticError):
    """A layer produced NaN or Inf.  ``layer`` is the 1-based layer index."""

    def __init__(self, message, layer=None):
        super().__init__(message)
        self.layer = layer


class InputError(TPNetError, ValueError):
    pass


class RankZeroError(TPNetError, ArithmeticError):
    pass


class UnsupportedOperatorError(TPNetError, ValueError):
    pass


class UnknownProblemError(TPNetError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DomainError(TPNetError, ValueError):
    """Evaluation point not covered by any solution block."""


class BlockFailure(TPNetError):
    def __init__(self, message, block_index):
        super().__init__(message)
        self.block_index = block_index
