"""JSON conversion for the objects that appear in results and witnesses."""

from __future__ import annotations

from fractions import Fraction

from .setalg_q import frac_str


def jsonify(obj):
    """Recursively convert to JSON-ready data; rationals become ``"p/q"`` strings."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return frac_str(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [jsonify(v) for v in sorted(obj)]
    raise TypeError(f"cannot serialize {type(obj).__name__}")
