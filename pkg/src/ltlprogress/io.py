"""JSON model and search files."""
from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from .pts import Pts, Transition

__all__ = [
    "InputError", "parse_rational", "format_rational", "model_from_dict",
    "model_to_dict", "search_from_dict", "load_model", "load_search",
    "dump_model",
]

_RATIONAL = re.compile(r"([0-9]+)(?:/([0-9]+))?")


class InputError(ValueError):
    """Malformed input file; the message starts with the offending location."""


def parse_rational(text: Any, where: str = "value") -> Fraction:
    if not isinstance(text, str):
        raise InputError(f"{where}: expected a string like \"1/2\", got {text!r}")
    m = _RATIONAL.fullmatch(text.strip())
    if m is None:
        raise InputError(f"{where}: {text!r} is not of the form num/den (decimals are rejected)")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise InputError(f"{where}: zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def _require(obj: dict, key: str, kind: type, where: str):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    if key not in obj:
        raise InputError(f"{where}: missing key {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        raise InputError(f"{where}.{key}: expected {kind.__name__}")
    return val


def model_from_dict(data: dict) -> Pts:
    ap = _require(data, "ap", list, "model")
    for i, a in enumerate(ap):
        if not isinstance(a, str):
            raise InputError(f"model.ap[{i}]: expected a string")
    initial = _require(data, "initial", str, "model")
    states: dict[str, frozenset[str]] = {}
    for i, st in enumerate(_require(data, "states", list, "model")):
        where = f"model.states[{i}]"
        sid = _require(st, "id", str, where)
        labels = st.get("labels", [])
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise InputError(f"{where}.labels: expected a list of strings")
        if len(set(labels)) != len(labels):
            raise InputError(f"{where}.labels: duplicate proposition")
        if sid in states:
            raise InputError(f"{where}.id: duplicate state id {sid!r}")
        states[sid] = frozenset(labels)
    transitions: dict[str, Transition] = {}
    for i, tr in enumerate(_require(data, "transitions", list, "model")):
        where = f"model.transitions[{i}]"
        tid = _require(tr, "id", str, where)
        src = _require(tr, "source", str, where)
        dst = _require(tr, "target", str, where)
        prob = parse_rational(tr.get("prob"), f"{where}.prob")
        if tid in transitions:
            raise InputError(f"{where}.id: duplicate transition id {tid!r}")
        transitions[tid] = Transition(tid, src, dst, prob)
    return Pts(frozenset(ap), states, initial, transitions)


def model_to_dict(model: Pts) -> dict:
    return {
        "ap": sorted(model.ap),
        "initial": model.initial,
        "states": [{"id": s, "labels": sorted(l)} for s, l in model.states.items()],
        "transitions": [
            {"id": t.id, "source": t.source, "target": t.target, "prob": format_rational(t.prob)}
            for t in model.transitions.values()
        ],
    }


def search_from_dict(data: dict) -> frozenset[str]:
    ids = _require(data, "transitions", list, "search")
    for i, tid in enumerate(ids):
        if not isinstance(tid, str):
            raise InputError(f"search.transitions[{i}]: expected a string")
    return frozenset(ids)


def _read_json(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_model(path) -> Pts:
    data = _read_json(path)
    try:
        return model_from_dict(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_search(path) -> frozenset[str]:
    data = _read_json(path)
    try:
        return search_from_dict(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def dump_model(model: Pts, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")
