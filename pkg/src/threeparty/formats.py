"""JSON instance and certificate files.

Rationals are JSON integers when integral and ``"num/den"`` strings
otherwise; floats are rejected. Item sets are sorted lists of item indices.
Output is canonical: fixed key order, two-space indent, trailing newline.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import (
    Allocation,
    Instance,
    ItemSet,
    PriceVector,
    check_num_items,
    items_of,
    to_rational,
)
from .pipeline import EquilibriumCertificate, EquilibriumVerdict
from .valuations import Additive, Explicit, Or, UnitDemand, Valuation

CERTIFICATE_FORMAT = "threeparty-certificate/1"
FIXTURE_ENV = "THREEPARTY_FIXTURE_DIR"


class FormatError(ValueError):
    """A document that does not describe a valid instance or certificate."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def rational_out(x: Fraction) -> int | str:
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _rational_in(x: Any, where: str) -> Fraction:
    if isinstance(x, float):
        raise FormatError(where, f"floating-point number {x!r}; write it as an integer or a \"num/den\" string")
    try:
        return to_rational(x)
    except (TypeError, ValueError) as exc:
        raise FormatError(where, str(exc)) from None


def _items_in(x: Any, k: int, where: str) -> ItemSet:
    if not isinstance(x, list):
        raise FormatError(where, "expected a list of item indices")
    mask = 0
    for pos, j in enumerate(x):
        if not isinstance(j, int) or isinstance(j, bool) or not 0 <= j < k:
            raise FormatError(f"{where}[{pos}]", f"not an item index below {k}: {j!r}")
        if mask >> j & 1:
            raise FormatError(f"{where}[{pos}]", f"item {j} listed twice")
        mask |= 1 << j
    return mask


def _get(obj: Any, key: str, where: str):
    if not isinstance(obj, dict):
        raise FormatError(where, "expected an object")
    if key not in obj:
        raise FormatError(where, f"missing field {key!r}")
    return obj[key]


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None


# -- valuations ----------------------------------------------------------------

def valuation_to_json(v: Valuation) -> dict:
    if isinstance(v, UnitDemand):
        return {"type": "unit_demand", "values": [rational_out(x) for x in v.values]}
    if isinstance(v, Additive):
        return {"type": "additive", "values": [rational_out(x) for x in v.values]}
    if isinstance(v, Or):
        return {"type": "or", "children": [valuation_to_json(c) for c in v.children]}
    if isinstance(v, Explicit):
        return {"type": "explicit", "table": [rational_out(x) for x in v.table]}
    raise TypeError(f"cannot serialise {type(v).__name__}")


def valuation_from_json(obj: Any, k: int, where: str) -> Valuation:
    kind = _get(obj, "type", where)
    if kind in ("unit_demand", "additive"):
        vals = _get(obj, "values", where)
        if not isinstance(vals, list) or len(vals) != k:
            raise FormatError(f"{where}.values", f"expected a list of {k} values")
        rats = tuple(_rational_in(x, f"{where}.values[{j}]") for j, x in enumerate(vals))
        cls = UnitDemand if kind == "unit_demand" else Additive
        try:
            return cls(rats)
        except ValueError as exc:
            raise FormatError(f"{where}.values", str(exc)) from None
    if kind == "explicit":
        table = _get(obj, "table", where)
        if not isinstance(table, list) or len(table) != 1 << k:
            raise FormatError(f"{where}.table", f"expected a list of {1 << k} values indexed by bitmask")
        rats = tuple(_rational_in(x, f"{where}.table[{s}]") for s, x in enumerate(table))
        try:
            return Explicit(k, rats)
        except ValueError as exc:
            raise FormatError(f"{where}.table", str(exc)) from None
    if kind == "or":
        children = _get(obj, "children", where)
        if not isinstance(children, list) or not children:
            raise FormatError(f"{where}.children", "expected a nonempty list")
        return Or(tuple(valuation_from_json(c, k, f"{where}.children[{i}]") for i, c in enumerate(children)))
    raise FormatError(f"{where}.type", f"unknown valuation type {kind!r}")


# -- instances -----------------------------------------------------------------

def instance_to_json(inst: Instance) -> dict:
    return {
        "num_items": inst.num_items,
        "bidders": [{"id": bid, "valuation": valuation_to_json(v)} for bid, v in inst.bidders],
        "mediators": [{"id": mid, "bidders": list(members)} for mid, members in inst.mediators],
    }


def instance_from_json(obj: Any) -> Instance:
    k = _get(obj, "num_items", "")
    if not isinstance(k, int) or isinstance(k, bool):
        raise FormatError("num_items", f"expected an integer, got {k!r}")
    try:
        check_num_items(k)
    except ValueError as exc:
        raise FormatError("num_items", str(exc)) from None
    bidders_raw = _get(obj, "bidders", "")
    if not isinstance(bidders_raw, list):
        raise FormatError("bidders", "expected a list")
    bidders = []
    for i, b in enumerate(bidders_raw):
        where = f"bidders[{i}]"
        bid = _get(b, "id", where)
        if not isinstance(bid, str) or not bid:
            raise FormatError(f"{where}.id", "expected a nonempty string")
        bidders.append((bid, valuation_from_json(_get(b, "valuation", where), k, f"{where}.valuation")))
    meds_raw = _get(obj, "mediators", "")
    if not isinstance(meds_raw, list):
        raise FormatError("mediators", "expected a list")
    meds = []
    for i, m in enumerate(meds_raw):
        where = f"mediators[{i}]"
        mid = _get(m, "id", where)
        members = _get(m, "bidders", where)
        if not isinstance(mid, str) or not mid:
            raise FormatError(f"{where}.id", "expected a nonempty string")
        if not isinstance(members, list) or not all(isinstance(x, str) for x in members):
            raise FormatError(f"{where}.bidders", "expected a list of bidder ids")
        meds.append((mid, tuple(members)))
    try:
        return Instance(k, tuple(bidders), tuple(meds))
    except ValueError as exc:
        raise FormatError("", str(exc)) from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def dump_instance(inst: Instance) -> str:
    return dumps(instance_to_json(inst))


def load_instance(text: str) -> Instance:
    return instance_from_json(_loads(text))


def canonicalize_instance(text: str) -> str:
    return dump_instance(load_instance(text))


def read_instance(path: str | os.PathLike) -> Instance:
    return load_instance(resolve_path(path).read_text())


# -- certificates --------------------------------------------------------------

def certificate_to_json(
    inst: Instance,
    cert: EquilibriumCertificate,
    verdict: EquilibriumVerdict | None = None,
    timings: dict[str, float] | None = None,
) -> dict:
    mids, bids = inst.mediator_ids, inst.bidder_ids
    doc: dict[str, Any] = {
        "format": CERTIFICATE_FORMAT,
        "num_items": inst.num_items,
        "central_prices": [rational_out(x) for x in cert.central_prices],
        "mediator_allocation": {m: items_of(s) for m, s in zip(mids, cert.mediator_allocation)},
        "local_prices": {m: [rational_out(x) for x in p] for m, p in zip(mids, cert.local_prices)},
        "bidder_allocation": {b: items_of(s) for b, s in zip(bids, cert.bidder_allocation)},
        "revenues": {m: rational_out(x) for m, x in zip(mids, cert.revenues)},
    }
    if verdict is not None:
        doc["verdicts"] = {
            v.name: {"passed": v.passed, "witnesses": list(v.witnesses)} for v in verdict.requirements
        }
    if timings is not None:
        doc["timings"] = {name: round(sec, 6) for name, sec in timings.items()}
    return doc


def certificate_from_json(obj: Any, inst: Instance) -> EquilibriumCertificate:
    if _get(obj, "format", "") != CERTIFICATE_FORMAT:
        raise FormatError("format", f"expected {CERTIFICATE_FORMAT!r}")
    k = _get(obj, "num_items", "")
    if k != inst.num_items:
        raise FormatError("num_items", f"certificate has {k} items, instance has {inst.num_items}")

    def prices(x, where) -> PriceVector:
        if not isinstance(x, list) or len(x) != k:
            raise FormatError(where, f"expected a list of {k} prices")
        try:
            return PriceVector(tuple(_rational_in(v, f"{where}[{j}]") for j, v in enumerate(x)))
        except ValueError as exc:
            raise FormatError(where, str(exc)) from None

    def keyed(field: str, ids: list[str]) -> list:
        table = _get(obj, field, "")
        if not isinstance(table, dict) or sorted(table) != sorted(ids):
            raise FormatError(field, f"expected one entry for each of {', '.join(ids)}")
        return [table[i] for i in ids]

    mids, bids = inst.mediator_ids, inst.bidder_ids
    r = prices(_get(obj, "central_prices", ""), "central_prices")
    try:
        med_alloc = Allocation(tuple(
            _items_in(x, k, f"mediator_allocation.{m}") for m, x in zip(mids, keyed("mediator_allocation", mids))
        ))
        bid_alloc = Allocation(tuple(
            _items_in(x, k, f"bidder_allocation.{b}") for b, x in zip(bids, keyed("bidder_allocation", bids))
        ))
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError("allocation", str(exc)) from None
    local = tuple(prices(x, f"local_prices.{m}") for m, x in zip(mids, keyed("local_prices", mids)))
    revs = tuple(_rational_in(x, f"revenues.{m}") for m, x in zip(mids, keyed("revenues", mids)))
    return EquilibriumCertificate(r, med_alloc, local, bid_alloc, revs)


def dump_certificate(inst, cert, verdict=None, timings=None) -> str:
    return dumps(certificate_to_json(inst, cert, verdict, timings))


def load_certificate(text: str, inst: Instance) -> EquilibriumCertificate:
    return certificate_from_json(_loads(text), inst)


# -- fixtures ------------------------------------------------------------------

def fixture_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    return Path(env) if env else Path(__file__).with_name("fixtures")


def resolve_path(path: str | os.PathLike) -> Path:
    """A path as given, or else the named file in the fixture directory."""
    p = Path(path)
    if p.exists():
        return p
    for cand in (fixture_dir() / p.name, fixture_dir() / f"{p.name}.json"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no such file or fixture: {path}")


__all__ = [
    "FormatError",
    "dump_instance",
    "load_instance",
    "canonicalize_instance",
    "read_instance",
    "dump_certificate",
    "load_certificate",
    "fixture_dir",
    "resolve_path",
]
