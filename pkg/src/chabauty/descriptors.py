"""JSON descriptors — parse and print subgroups, sphere points, elements, automorphisms.

Numbers may be JSON numbers or strings; strings are read as exact values
("3/4", "sqrt(2)") where possible and as decimals otherwise.  Infinite values
are written as the strings "inf" / "-inf".
"""

from __future__ import annotations

import cmath
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from chabauty.ambient import HeisAutomorphism, HeisElement
from chabauty.closure import closure, closure_r
from chabauty.errors import ChabautyError, DescriptorError
from chabauty.euclid import (
    ClosedSubgroupC,
    ClosedSubgroupR,
    Cyclic,
    Full,
    Lattice,
    Line,
    LineCyclic,
    Zero,
    linear_image,
    scale,
)
from chabauty.exact import parse_exact
from chabauty.heisenberg import (
    Central,
    HeisLattice,
    HeisSubgroup,
    Planar,
    PullbackCenter,
    Trivial,
    central,
    collapsing_lattice,
    collapsing_limit,
    dilate_lattice,
    planar,
    pullback_center,
    standard_lattice,
)
from chabauty.sphere import INFINITY, SpherePoint

log = logging.getLogger(__name__)


# ── scalars ──────────────────────────────────────────────────────────────────


def parse_number(value: object) -> float:
    if isinstance(value, bool) or value is None:
        raise DescriptorError(f"not a number: {value!r}")
    if isinstance(value, (int, float, Fraction)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return float(text)
        except ValueError:
            pass
        return float(parse_exact(text))
    raise DescriptorError(f"not a number: {value!r}")


def parse_scalar(value: object) -> int | Fraction | float:
    """Keep rationals exact ("1/2" → Fraction) and everything else as float."""
    if isinstance(value, bool) or value is None:
        raise DescriptorError(f"not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, str) and "." not in value and "e" not in value.lower():
        try:
            q = Fraction(value.strip())
        except ValueError:
            return parse_number(value)
        return q.numerator if q.denominator == 1 else q
    return parse_number(value)


def parse_complex(value: object) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise DescriptorError(f"complex number must be a [re, im] pair, got {value!r}")
        return complex(parse_number(value[0]), parse_number(value[1]))
    if isinstance(value, dict) and {"re", "im"} <= value.keys():
        return complex(parse_number(value["re"]), parse_number(value["im"]))
    return complex(parse_number(value), 0.0)


def number_to_json(x) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return None
    return x


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [number_to_json(z.real), number_to_json(z.imag)]


def _require(data: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in data]
    if missing:
        raise DescriptorError(f"descriptor {data!r} is missing {', '.join(missing)}")


def _as_dict(data: object, what: str) -> dict:
    if not isinstance(data, dict):
        raise DescriptorError(f"{what} descriptor must be a JSON object, got {data!r}")
    return data


# ── subgroups of ℂ ───────────────────────────────────────────────────────────


def parse_c(data: object) -> ClosedSubgroupC:
    data = _as_dict(data, "subgroup")
    if "gens" in data:
        return closure(data["gens"])
    _require(data, "stratum")
    try:
        match data["stratum"]:
            case "zero":
                return Zero()
            case "full":
                return Full()
            case "cyclic":
                _require(data, "generator")
                return Cyclic(parse_complex(data["generator"]))
            case "line":
                if "direction" in data:
                    return Line.through(parse_complex(data["direction"]))
                _require(data, "angle")
                return Line(parse_number(data["angle"]))
            case "line_cyclic":
                if "direction" in data:
                    _require(data, "transverse")
                    return LineCyclic.from_vectors(parse_complex(data["direction"]), parse_complex(data["transverse"]))
                _require(data, "angle", "height")
                return LineCyclic(parse_number(data["angle"]), parse_number(data["height"]))
            case "lattice":
                _require(data, "basis")
                basis = data["basis"]
                if not isinstance(basis, list) or len(basis) != 2:
                    raise DescriptorError(f"lattice basis must hold two vectors, got {basis!r}")
                return Lattice(parse_complex(basis[0]), parse_complex(basis[1]))
    except (TypeError, KeyError) as exc:
        raise DescriptorError(f"malformed descriptor {data!r}: {exc}") from None
    raise DescriptorError(f"unknown stratum {data['stratum']!r}")


def c_to_json(c: ClosedSubgroupC) -> dict:
    out: dict[str, Any] = {"stratum": c.stratum}
    match c:
        case Cyclic(generator=g):
            out["generator"] = complex_to_json(g)
        case Line(angle=a):
            out["angle"] = a
        case LineCyclic(angle=a, height=h):
            out["angle"] = a
            out["height"] = h
        case Lattice(z=z, zp=zp):
            out["basis"] = [complex_to_json(z), complex_to_json(zp)]
    return out


# ── subgroups of ℝ ───────────────────────────────────────────────────────────


def parse_r(data: object) -> ClosedSubgroupR:
    data = _as_dict(data, "subgroup")
    if "kind" in data:
        match data["kind"]:
            case "trivial":
                return ClosedSubgroupR.trivial()
            case "full":
                return ClosedSubgroupR.full()
            case "cyclic":
                _require(data, "step")
                return ClosedSubgroupR.cyclic(parse_number(data["step"]))
        raise DescriptorError(f"unknown subgroup kind {data['kind']!r}")
    if data.get("trivial"):
        return ClosedSubgroupR.trivial()
    if data.get("full"):
        return ClosedSubgroupR.full()
    if "cyclic" in data:
        return ClosedSubgroupR.cyclic(parse_number(data["cyclic"]))
    if "param" in data:
        return ClosedSubgroupR.from_param(parse_number(data["param"]))
    if "gens" in data:
        return closure_r(data["gens"])
    raise DescriptorError(f"cannot read a subgroup of R from {data!r}")


def r_to_json(r: ClosedSubgroupR) -> dict:
    out: dict[str, Any] = {"kind": r.kind}
    if r.kind == "cyclic":
        out["step"] = r.step
    out["param"] = number_to_json(r.param)
    return out


# ── subgroups of H ───────────────────────────────────────────────────────────


def parse_h(data: object) -> HeisSubgroup:
    data = _as_dict(data, "subgroup")
    _require(data, "kind")
    match data["kind"]:
        case "heis-lattice":
            _require(data, "z", "zp")
            n = data.get("n", 1)
            if isinstance(n, bool) or not isinstance(n, int):
                raise DescriptorError(f"central index must be an integer, got {n!r}")
            return HeisLattice(
                parse_complex(data["z"]),
                parse_complex(data["zp"]),
                parse_number(data.get("t", 0)),
                parse_number(data.get("tp", 0)),
                n,
            )
        case "standard-lattice":
            return standard_lattice(int(data.get("n", 1)))
        case "collapsing":
            _require(data, "k")
            return collapsing_lattice(int(data.get("n", 1)), int(data["k"]))
        case "collapsing-limit":
            return collapsing_limit()
        case "trivial":
            return Trivial()
        case "central":
            if data.get("full"):
                return central(ClosedSubgroupR.full())
            _require(data, "step")
            return central(ClosedSubgroupR.cyclic(parse_number(data["step"])))
        case "planar":
            _require(data, "angle", "plane")
            return planar(parse_number(data["angle"]), parse_c(data["plane"]))
        case "pullback":
            _require(data, "base")
            return pullback_center(parse_c(data["base"]))
    raise DescriptorError(f"unknown subgroup kind {data['kind']!r}")


def h_to_json(s: HeisSubgroup) -> dict:
    match s:
        case HeisLattice():
            return {
                "kind": "heis-lattice",
                "z": complex_to_json(s.z),
                "zp": complex_to_json(s.zp),
                "t": s.t,
                "tp": s.tp,
                "n": s.n,
                "stratum": s.stratum,
            }
        case Trivial():
            return {"kind": "trivial", "stratum": s.stratum}
        case Central(sub=sub):
            return {"kind": "central", "step": sub.step, "stratum": s.stratum}
        case Planar(angle=a, plane=plane):
            return {"kind": "planar", "angle": a, "plane": c_to_json(plane), "stratum": s.stratum}
        case PullbackCenter(base=c):
            return {"kind": "pullback", "base": c_to_json(c), "stratum": s.stratum}
    raise DescriptorError(f"not a closed subgroup of H: {s!r}")


# ── dispatch by ambient space ────────────────────────────────────────────────

_PARSERS = {"R": parse_r, "C": parse_c, "H": parse_h}
_PRINTERS = {"R": r_to_json, "C": c_to_json, "H": h_to_json}


def parse_subgroup(space: str, data: object):
    try:
        return _PARSERS[space.upper()](data)
    except KeyError:
        raise DescriptorError(f"unknown space {space!r}") from None


def subgroup_to_json(space: str, obj) -> dict:
    return _PRINTERS[space.upper()](obj)


# ── families ─────────────────────────────────────────────────────────────────


def _scaled(space: str, base, factor: float):
    """factor·F in ℝ or ℂ; the dilation φ_factor in H."""
    match space:
        case "R":
            if base.kind != "cyclic":
                return base
            return ClosedSubgroupR.cyclic(base.step * factor)
        case "C":
            return scale(base, factor)
    if not isinstance(base, HeisLattice):
        raise DescriptorError(f"dilation families need a lattice base, got stratum {base.stratum!r}")
    return dilate_lattice(base, factor)


def parse_family(space: str, data: object) -> tuple[Callable[[int], Any], list[int] | None]:
    """An indexed family of subgroups: ``(member, indices)``.

    Accepted forms:
      * a list of descriptors, indexed 0, 1, …
      * {"family": "scaled", "base": D, "power": p}: k ↦ p^k·D (k·D without ``power``)
      * {"family": "stretch", "base": D, ...}: k ↦ diag(k, 1/k)·D          (C)
      * {"family": "rotate", "base": D, ...}: k ↦ e^{ik}·D                  (C)
      * {"family": "collapsing", "n": n}: k ↦ the k-th collapsing lattice   (H)
    Dict forms take optional explicit indices in "ks".
    """
    space = space.upper()
    if isinstance(data, list):
        members = [parse_subgroup(space, d) for d in data]
        return members.__getitem__, list(range(len(members)))
    data = _as_dict(data, "family")
    _require(data, "family")
    ks = data.get("ks")
    if ks is not None and (not isinstance(ks, list) or not all(isinstance(k, (int, float)) for k in ks)):
        raise DescriptorError(f"'ks' must be a list of numbers, got {ks!r}")
    kind = data["family"]
    if kind == "collapsing":
        if space != "H":
            raise DescriptorError("the collapsing family lives in H")
        n = int(data.get("n", 1))
        return (lambda k: collapsing_lattice(n, int(k))), ks
    _require(data, "base")
    base = parse_subgroup(space, data["base"])
    match kind:
        case "scaled":
            power = parse_number(data["power"]) if "power" in data else None
            if power is not None and not power > 0:
                raise DescriptorError(f"power must be positive, got {power}")
            return (lambda k: _scaled(space, base, power**k if power is not None else k)), ks
        case "stretch" if space == "C":
            return (lambda k: linear_image(base, (k, 0, 0, 1 / k))), ks
        case "rotate" if space == "C":
            return (lambda k: scale(base, cmath.exp(1j * k))), ks
    raise DescriptorError(f"unknown family {kind!r} in space {space}")


# ── other values ─────────────────────────────────────────────────────────────


def parse_sphere_point(data: object) -> SpherePoint:
    data = _as_dict(data, "sphere point")
    if data.get("infinity"):
        return INFINITY
    return SpherePoint(parse_complex(data.get("a", 0)), parse_complex(data.get("b", 0)))


def sphere_to_json(x: SpherePoint) -> dict:
    if x.infinite:
        return {"infinity": True}
    return {"a": complex_to_json(x.a), "b": complex_to_json(x.b)}


def parse_element(data: object) -> HeisElement:
    """[x, y, t] or {"z": [re, im], "t": t}."""
    if isinstance(data, dict):
        _require(data, "z")
        z = data["z"]
        if isinstance(z, (list, tuple)) and len(z) == 2:
            x, y = parse_scalar(z[0]), parse_scalar(z[1])
        else:
            x, y = parse_scalar(z), 0
        return HeisElement(x, y, parse_scalar(data.get("t", 0)))
    if isinstance(data, (list, tuple)) and len(data) == 3:
        return HeisElement(*(parse_scalar(v) for v in data))
    raise DescriptorError(f"element must be [x, y, t] or {{'z': ..., 't': ...}}, got {data!r}")


def element_to_json(x: HeisElement) -> list:
    return [number_to_json(v) for v in x.as_tuple()]


def parse_automorphism(data: object) -> HeisAutomorphism:
    data = _as_dict(data, "automorphism")
    matrix = data.get("matrix", [1, 0, 0, 1])
    if isinstance(matrix, list) and len(matrix) == 2 and all(isinstance(r, list) for r in matrix):
        matrix = [v for row in matrix for v in row]
    if not isinstance(matrix, list) or len(matrix) != 4:
        raise DescriptorError(f"matrix must hold four entries, got {matrix!r}")
    inner = data.get("inner", [0, 0])
    if not isinstance(inner, list) or len(inner) != 2:
        raise DescriptorError(f"inner part must be an [x, y] pair, got {inner!r}")
    return HeisAutomorphism(tuple(parse_scalar(v) for v in matrix), tuple(parse_scalar(v) for v in inner))


# ── input ────────────────────────────────────────────────────────────────────


def load_json(text: str) -> Any:
    """Inline JSON, or the path of a file holding it."""
    stripped = text.strip()
    if stripped and stripped[0] not in "[{\"" and Path(stripped).is_file():
        log.debug("reading descriptor from %s", stripped)
        stripped = Path(stripped).read_text()
    try:
        return json.loads(stripped)
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"invalid JSON descriptor {text!r}: {exc}") from None


def load_subgroup(space: str, text: str):
    try:
        return parse_subgroup(space, load_json(text))
    except ChabautyError:
        raise
    except (TypeError, ValueError) as exc:
        raise DescriptorError(f"malformed descriptor {text!r}: {exc}") from None
