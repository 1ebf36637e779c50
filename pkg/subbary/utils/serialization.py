"""
JSON/CSV input and output.

Rationals are read from integers, decimal strings or "p/q" strings and written
either as 15-significant-digit decimals or, when exact output is requested,
as "p/q".
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

from ..models.errors import EmptyInput, ParseError
from ..models.geometry import ConvexBody
from ..models.invariants import DiscreteCandidate, JumpingData, ValuationRecord
from ..models.profile import ConcaveProfile
from .exact import to_fraction

logger = logging.getLogger(__name__)

Source = Union[str, Path, Dict, List]
FORMATS = ("json", "csv")


def read_json(source: Source, field: str = "input") -> Any:
    """Parse a JSON file (or pass an already-decoded object through)"""
    if isinstance(source, (dict, list)):
        return source
    path = Path(source)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}", field)
    except json.JSONDecodeError as e:
        logger.error(f"Error parsing {path}: {str(e)}")
        raise ParseError(f"invalid JSON in {path} ({e.msg} at line {e.lineno})", field)


def _require(data: Dict, key: str, context: str) -> Any:
    if not isinstance(data, dict):
        raise ParseError(f"expected a JSON object, got {type(data).__name__}", context)
    if key not in data:
        raise ParseError("missing required key", f"{context}.{key}" if context else key)
    return data[key]


def _number(value: Any, field: str) -> float:
    return float(to_fraction(value, field))


def _integer(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"expected an integer, got {value!r}", field)
    return value


def load_body(source: Source, kernel, field: str = "body") -> ConvexBody:
    data = read_json(source, field)
    dim = _require(data, "dim", field)
    vertices = _require(data, "vertices", field)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ParseError(f"dim must be a positive integer, got {dim!r}", f"{field}.dim")
    if not isinstance(vertices, list) or not all(isinstance(v, list) for v in vertices):
        raise ParseError("vertices must be a list of coordinate lists", f"{field}.vertices")
    points = [[to_fraction(x, f"{field}.vertices[{i}]") for x in v] for i, v in enumerate(vertices)]
    return kernel.build(points, dim)


def dump_body(body: ConvexBody, exact: bool = True) -> str:
    return json.dumps(body.to_dict(exact=exact), indent=2)


def load_profile(source: Source, field: str = "profile") -> ConcaveProfile:
    data = read_json(source, field)
    breakpoints = _require(data, "breakpoints", field)
    values = _require(data, "values", field)
    if not isinstance(breakpoints, list) or not isinstance(values, list):
        raise ParseError("breakpoints and values must be lists", field)
    T = _number(data["T"], f"{field}.T") if "T" in data else None
    s = [_number(x, f"{field}.breakpoints[{i}]") for i, x in enumerate(breakpoints)]
    v = [_number(x, f"{field}.values[{i}]") for i, x in enumerate(values)]
    if T is None:
        if not s:
            raise ParseError("empty breakpoint list", f"{field}.breakpoints")
        T = s[-1]
    return ConcaveProfile(T=T, breakpoints=tuple(s), values=tuple(v))


def dump_profile(profile: ConcaveProfile) -> str:
    return json.dumps(profile.to_dict(), indent=2)


def _records(data: Any, key: str) -> List[Dict]:
    if isinstance(data, dict) and key in data:
        data = data[key]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise ParseError(f"expected a record or a list of records, got {type(data).__name__}", key)
    return data


def load_jumping_data(source: Source, field: str = "jumping") -> JumpingData:
    data = read_json(source, field)
    k = _require(data, "k", field)
    d_k = _require(data, "d_k", field)
    j = _require(data, "j", field)
    if not isinstance(j, list):
        raise ParseError("j must be a list of numbers", f"{field}.j")
    return JumpingData(
        k=_integer(k, f"{field}.k"),
        d_k=_integer(d_k, f"{field}.d_k"),
        j=tuple(_number(x, f"{field}.j[{i}]") for i, x in enumerate(j)),
    )


def load_valuations(source: Source, kernel, allow_nonpositive_A: bool = False) -> List[ValuationRecord]:
    records = []
    for i, item in enumerate(_records(read_json(source, "valuations"), "valuations")):
        context = f"valuations[{i}]"
        records.append(ValuationRecord(
            name=str(_require(item, "name", context)),
            A=_number(_require(item, "A", context), f"{context}.A"),
            body=load_body(_require(item, "body", context), kernel, f"{context}.body"),
            scale=_number(item.get("scale", 1), f"{context}.scale"),
            allow_nonpositive_A=allow_nonpositive_A,
        ))
    if not records:
        raise EmptyInput("no valuation records")
    logger.info(f"Loaded {len(records)} valuation record(s)")
    return records


def load_discrete_candidates(source: Source) -> List[DiscreteCandidate]:
    """Records of the form {"name", "A", "jumping": {"k", "d_k", "j"}}"""
    candidates = []
    for i, item in enumerate(_records(read_json(source, "candidates"), "candidates")):
        context = f"candidates[{i}]"
        candidates.append(DiscreteCandidate(
            name=str(_require(item, "name", context)),
            A=_number(_require(item, "A", context), f"{context}.A"),
            data=load_jumping_data(_require(item, "jumping", context), f"{context}.jumping"),
        ))
    if not candidates:
        raise EmptyInput("no candidate records")
    return candidates


def render_table(rows: Sequence[Dict[str, Any]], columns: Sequence[str], fmt: str = "json") -> str:
    """Rows as a JSON array or as CSV with a header line"""
    if fmt not in FORMATS:
        raise ParseError(f"unknown output format {fmt!r}, expected one of {FORMATS}", "emit")
    if fmt == "json":
        return json.dumps([{c: row.get(c) for c in columns} for row in rows], indent=2)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def render_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False)
