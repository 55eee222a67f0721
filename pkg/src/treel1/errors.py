"""Exception types raised across the package."""


class TreeError(ValueError):
    """Malformed tree input."""


class DuplicateChild(TreeError):
    pass


class DisconnectedVertex(TreeError):
    pass


class NegativeLength(TreeError):
    pass


class CycleDetected(TreeError):
    pass


class UnknownVertex(KeyError):
    pass


class UnknownColor(KeyError):
    pass


class DegenerateTree(ValueError):
    """Every edge has length zero, so no scale can be selected."""


class SizeOverflow(ValueError):
    pass


class MissingLabel(KeyError):
    pass


class RoundBudgetExceeded(RuntimeError):
    def __init__(self, max_rounds, violated=None):
        super().__init__(f"resampling did not converge within {max_rounds} rounds")
        self.max_rounds = max_rounds
        self.violated = violated or []


class StarMismatch(ValueError):
    pass


class NoWitness(RuntimeError):
    pass


class RowOverflow(RuntimeError):
    pass


class NonFiniteSum(ValueError):
    pass


class RetryBudgetExhausted(RuntimeError):
    def __init__(self, best, attempts):
        super().__init__(f"target distortion not met after {attempts} attempts")
        self.best = best
        self.attempts = attempts


class ParseError(ValueError):
    pass
