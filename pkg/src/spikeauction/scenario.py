"""Scenario files: the JSON documents the command line reads.

Example::

    {
      "bidders": [{"id": "a", "value": 10}, {"id": "b", "value": 6}],
      "spikes": [0.7, 0.3],
      "epsilons": [0.0, 0.1],
      "ssa": {"slots": 2, "position_ctrs": [1.0, 0.5], "spike_count": 2},
      "objective": "revenue"
    }

Structural problems (bad JSON, missing or mistyped fields) raise
:class:`ScenarioParseError`; domain invariants are checked afterwards by the
value types themselves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .core import BidderProfile, CapacityParams, SpikeVector
from .ssa import KeywordAuctionConfig

OBJECTIVES = ("revenue", "efficiency", "ssa_revenue")
_FIELDS = {"bidders", "spikes", "epsilons", "ssa", "objective"}


class ScenarioParseError(Exception):
    def __init__(self, message: str, line: int | None = None, field: str | None = None) -> None:
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.field = field


@dataclass(frozen=True)
class Scenario:
    bidders: tuple[BidderProfile, ...]
    spikes: SpikeVector | None = None
    epsilons: CapacityParams | None = None
    ssa: KeywordAuctionConfig | None = None
    objective: str = "revenue"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "bidders": [
                {"id": b.id, "value": b.value, "relevance": b.relevance} for b in self.bidders
            ]
        }
        if self.spikes is not None:
            out["spikes"] = list(self.spikes.probs)
        if self.epsilons is not None:
            out["epsilons"] = list(self.epsilons.epsilons)
        if self.ssa is not None:
            out["ssa"] = {
                "slots": self.ssa.slots,
                "position_ctrs": list(self.ssa.position_ctrs),
                "spike_count": self.ssa.spike_count,
            }
        out["objective"] = self.objective
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(f"expected a number, got {type(value).__name__}", field=field)
    return float(value)


def _integer(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioParseError(f"expected an integer, got {type(value).__name__}", field=field)
    return value


def _numbers(value: Any, field: str) -> list[float]:
    if not isinstance(value, list):
        raise ScenarioParseError(f"expected an array, got {type(value).__name__}", field=field)
    return [_number(v, f"{field}[{i}]") for i, v in enumerate(value)]


def _parse_bidders(raw: Any) -> list[tuple[Any, float, float]]:
    if not isinstance(raw, list):
        raise ScenarioParseError("expected an array of bidder objects", field="bidders")
    out = []
    for i, item in enumerate(raw):
        where = f"bidders[{i}]"
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append((i, float(item), 1.0))
            continue
        if not isinstance(item, dict):
            raise ScenarioParseError("expected an object or a number", field=where)
        unknown = set(item) - {"id", "value", "relevance"}
        if unknown:
            raise ScenarioParseError(f"unknown keys {sorted(unknown)}", field=where)
        if "value" not in item:
            raise ScenarioParseError("missing required key 'value'", field=where)
        ident = item.get("id", i)
        if not isinstance(ident, (str, int)) or isinstance(ident, bool):
            raise ScenarioParseError("id must be a string or an integer", field=f"{where}.id")
        value = _number(item["value"], f"{where}.value")
        relevance = _number(item.get("relevance", 1.0), f"{where}.relevance")
        out.append((ident, value, relevance))
    ids = [b[0] for b in out]
    if len(set(map(repr, ids))) != len(ids):
        raise ScenarioParseError("bidder ids must be unique", field="bidders")
    if len({type(x) for x in ids}) > 1:
        raise ScenarioParseError("bidder ids must all be strings or all integers", field="bidders")
    return out


def _line_of(text: str, key: str) -> int | None:
    needle = f'"{key}"'
    for n, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return n
    return None


def parse_scenario(text: str) -> Scenario:
    """Parse scenario JSON; domain-invariant errors propagate as ``ValidationError``."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(exc.msg + f" (column {exc.colno})", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ScenarioParseError("top level must be an object")
    unknown = set(raw) - _FIELDS
    if unknown:
        key = sorted(unknown)[0]
        raise ScenarioParseError(f"unknown key {key!r}", line=_line_of(text, key), field=key)
    if "bidders" not in raw:
        raise ScenarioParseError("missing required key 'bidders'", field="bidders")

    try:
        bidder_rows = _parse_bidders(raw["bidders"])
        spikes = _numbers(raw["spikes"], "spikes") if raw.get("spikes") is not None else None
        eps = _numbers(raw["epsilons"], "epsilons") if raw.get("epsilons") is not None else None
        ssa_raw = raw.get("ssa")
        ssa_args = None
        if ssa_raw is not None:
            if not isinstance(ssa_raw, dict):
                raise ScenarioParseError("expected an object", field="ssa")
            for key in ("slots", "position_ctrs"):
                if key not in ssa_raw:
                    raise ScenarioParseError(f"missing required key {key!r}", field="ssa")
            extra = set(ssa_raw) - {"slots", "position_ctrs", "spike_count"}
            if extra:
                raise ScenarioParseError(f"unknown keys {sorted(extra)}", field="ssa")
            ssa_args = (
                _integer(ssa_raw["slots"], "ssa.slots"),
                _numbers(ssa_raw["position_ctrs"], "ssa.position_ctrs"),
                _integer(ssa_raw.get("spike_count", len(spikes) if spikes else 1), "ssa.spike_count"),
            )
        objective = raw.get("objective", "revenue")
        if not isinstance(objective, str):
            raise ScenarioParseError("expected a string", field="objective")
        objective = objective.replace("-", "_")
        if objective not in OBJECTIVES:
            raise ScenarioParseError(f"must be one of {', '.join(OBJECTIVES)}", field="objective")
    except ScenarioParseError as exc:
        if exc.line is None and exc.field is not None:
            top = exc.field.split("[")[0].split(".")[0]
            raise ScenarioParseError(
                str(exc).split(": ", 1)[-1], line=_line_of(text, top), field=exc.field
            ) from None
        raise

    return Scenario(
        bidders=tuple(BidderProfile(i, v, e) for i, v, e in bidder_rows),
        spikes=SpikeVector(spikes) if spikes is not None else None,
        epsilons=CapacityParams(eps) if eps is not None else None,
        ssa=KeywordAuctionConfig(*ssa_args) if ssa_args is not None else None,
        objective=objective,
    )


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"cannot read scenario: {exc.strerror}") from None
    return parse_scenario(text)
