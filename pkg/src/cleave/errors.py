"""Exception types shared across modules."""


class CleaveError(Exception):
    pass


class ZeroNormal(CleaveError, ValueError):
    pass


class NotUnit(CleaveError, ValueError):
    pass


class BadIndex(CleaveError, IndexError):
    pass


class BadVertex(CleaveError, IndexError):
    pass


class NonGeneric(CleaveError):
    """Configuration too close to a tangency or multiple contact to decide."""


class NumericFailure(CleaveError):
    pass


class NotCleaving(CleaveError):
    def __init__(self, msg="", step=None):
        super().__init__(msg)
        self.step = step


class ColourMismatch(CleaveError):
    pass


class NotApplicable(CleaveError):
    pass


class NotParallel(CleaveError):
    pass


class AmbiguousComponent(CleaveError):
    pass


class AmbiguousLeaf(NonGeneric):
    pass


class EmptyInterval(CleaveError):
    pass


class BadLabels(CleaveError, ValueError):
    pass


class CyclicOrientation(CleaveError):
    pass


class MultipleSinks(CleaveError):
    pass


class DimMismatch(CleaveError, ValueError):
    pass


class BudgetExceeded(CleaveError):
    pass


class ExhaustedRetries(CleaveError):
    pass
