"""Numerical tolerances. All predicates read them from here unless given explicitly."""
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    unit: float = 1e-9      # unit-length and orthogonality checks
    side: float = 1e-9      # sidedness of a point w.r.t. a hyperplane
    tangent: float = 1e-6   # genericity guard (tangency, triple contact)
    angle: float = 1e-9     # arc endpoint comparisons on S^1
    same_plane: float = 1e-9  # two decorations are treated as one circle


DEFAULT = Tolerances()
_current = DEFAULT


def current() -> Tolerances:
    return _current


def set_tolerances(**kw) -> Tolerances:
    """Replace process-wide tolerances; returns the previous value."""
    global _current
    prev = _current
    _current = replace(_current, **kw)
    return prev


def restore(tol: Tolerances) -> None:
    global _current
    _current = tol
