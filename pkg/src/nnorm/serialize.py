"""JSON encodings of elements, norms and reports.

Vectors are arrays of numbers, polynomials ``{"coeffs": [...]}``, product
pairs ``{"left": ..., "right": ...}``. Floats are written with 17
significant digits so every double round-trips.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math

import numpy as np

from .core import NNorm, NNormError, Polynomial, ProductPair, make_norm


def encode_element(x):
    if isinstance(x, Polynomial):
        return {"coeffs": [float(c) for c in x.coeffs]}
    if isinstance(x, ProductPair):
        return {"left": encode_element(x.left), "right": encode_element(x.right)}
    return [float(c) for c in np.asarray(x, dtype=float)]


def decode_element(obj):
    if isinstance(obj, dict):
        if "coeffs" in obj:
            return Polynomial(obj["coeffs"])
        if "left" in obj and "right" in obj:
            return ProductPair(decode_element(obj["left"]), decode_element(obj["right"]))
        raise NNormError(f"unrecognized element object with keys {sorted(obj)}")
    if isinstance(obj, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
        arr = np.array(obj, dtype=float)
        if arr.size == 0 or not np.all(np.isfinite(arr)):
            raise NNormError("vectors must be non-empty and finite")
        return arr
    raise NNormError(f"cannot decode element from {obj!r}")


def decode_norm(obj) -> NNorm:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise NNormError("norm must be an object with a 'kind' field")
    kind = obj["kind"]
    comps = [decode_norm(c) for c in obj.get("components", [])]
    arity = obj.get("arity", comps[0].arity if comps else None)
    if arity is None:
        raise NNormError("norm needs an 'arity'")
    kw = {}
    if kind == "poly_coeff_product" and "max_degree" in obj:
        kw["max_degree"] = int(obj["max_degree"])
    norm = make_norm(kind, int(arity), comps, **kw)
    if comps and norm.arity != int(arity):
        raise NNormError("declared arity disagrees with the components")
    return norm


def to_jsonable(obj):
    """Recursively convert reports, dataclasses and numpy values to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (Polynomial, ProductPair)):
        return encode_element(obj)
    if isinstance(obj, NNorm):
        return obj.to_dict()
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _format(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + pad if indent else ", "
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return "NaN"
        if math.isinf(obj):
            return "Infinity" if obj > 0 else "-Infinity"
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_format(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_format(v, 0, 0) for v in obj) + "]"
        return "[" + pad + sep.join(_format(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _format(to_jsonable(obj), indent, 0)


def _infer_norm(obj) -> NNorm:
    """Norm of a functional request; defaults to the determinant norm for
    vector anchors and the coefficient norm for ``b_scalars``."""
    if "norm" in obj:
        return decode_norm(obj["norm"])
    action = obj.get("action", {})
    if "b_scalars" in action:
        return make_norm("poly_coeff_product", len(action["b_scalars"]) + 1)
    anchors = obj.get("anchors")
    if anchors and all(isinstance(b, list) for b in anchors):
        return make_norm("determinant", len(anchors) + 1)
    raise NNormError("cannot infer the n-norm; give a 'norm' field")


def decode_anchors(obj):
    from .functional import BAnchors

    norm = _infer_norm(obj)
    anchors = [decode_element(b) for b in obj.get("anchors", [])]
    return BAnchors(norm, anchors, constant=bool(obj.get("constant", False)))


def decode_functional(obj):
    """Inverse of ``BLinearFunctional.to_dict``.

    Partial-sum actions may carry ``b_scalars`` in place of explicit anchors.
    """
    from .core import PolyCoeffProductNorm
    from .functional import BAnchors, BLinearFunctional, DeterminantForm, PartialSumForm, WeightForm

    if not isinstance(obj, dict) or "action" not in obj:
        raise NNormError("functional must be an object with an 'action'")
    action = obj["action"]
    kind = action.get("kind")
    if kind == "partial_sum" and "b_scalars" in action and not obj.get("anchors"):
        norm = _infer_norm(obj)
        if not isinstance(norm, PolyCoeffProductNorm):
            raise NNormError("partial-sum functionals need the polynomial coefficient norm")
        anchors = BAnchors.constants(norm, action["b_scalars"])
    else:
        anchors = decode_anchors(obj)
    if kind == "weight":
        act = WeightForm(np.asarray(action["w"], dtype=float))
    elif kind == "determinant":
        act = DeterminantForm(float(action["c"]))
    elif kind == "partial_sum":
        act = PartialSumForm(int(action["k"]))
    else:
        raise NNormError(f"unknown action kind {kind!r}")
    carrier = obj.get("carrier")
    return BLinearFunctional(anchors, act, None if carrier is None else np.asarray(carrier, dtype=float),
                             obj.get("label", ""))
