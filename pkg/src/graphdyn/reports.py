"""Uniform result records for the numerical checkers.

Every checker in this package returns a ``CheckReport`` so the CLI can emit
one stable JSON schema for all of them.
"""

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    name: str
    passed: bool
    max_defect: float = 0.0
    tolerance: float = 0.0
    argmax: object = None
    count: int = 0
    offenders: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "max_defect": float(self.max_defect),
            "tolerance": float(self.tolerance),
            "argmax": _jsonable(self.argmax),
            "count": int(self.count),
            "offenders": [_jsonable(o) for o in self.offenders],
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(obj):
    """Best-effort conversion to JSON-serialisable primitives."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _jsonable(obj.item())
    if hasattr(obj, "tolist"):  # numpy array
        return _jsonable(obj.tolist())
    return str(obj)


def summarize(reports):
    """Aggregate pass flag over a list of reports."""
    return all(r.passed for r in reports)
