"""The ``name:key=value,key=value`` mini-language for strategies and predicates."""

from __future__ import annotations

import re

_SEP = re.compile(r"[,:](?=[A-Za-z_][A-Za-z0-9_]*=)")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_*+-]*$")


class SpecError(ValueError):
    """Malformed strategy or predicate description."""


def parse_spec(text: str) -> tuple[str, dict[str, str]]:
    """Split ``"min_degree:k=2,mode=full"`` into ``("min_degree", {"k": "2", "mode": "full"})``.

    Parameters may be separated by ``,`` or ``:``; a value may itself
    contain ``:`` (``subgraph:graph=matching:10``).
    """
    text = text.strip()
    name, _, rest = text.partition(":")
    if not _NAME.match(name):
        raise SpecError(f"bad name in {text!r}")
    params: dict[str, str] = {}
    if rest:
        for part in _SEP.split(rest):
            key, eq, value = part.partition("=")
            if not eq or not key or not value:
                raise SpecError(f"expected key=value, got {part!r} in {text!r}")
            if key in params:
                raise SpecError(f"repeated parameter {key!r} in {text!r}")
            params[key] = value
    return name, params


def format_spec(name: str, params: dict[str, object]) -> str:
    if not params:
        return name
    return name + ":" + ",".join(f"{k}={v}" for k, v in params.items())


def take_int(params: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in params:
        if default is None:
            raise SpecError(f"missing parameter {key!r}")
        return default
    try:
        return int(params.pop(key))
    except ValueError:
        raise SpecError(f"parameter {key!r} must be an integer") from None


def reject_extra(name: str, params: dict[str, str]) -> None:
    if params:
        raise SpecError(f"unknown parameter(s) for {name}: {', '.join(sorted(params))}")
