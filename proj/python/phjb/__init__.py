"""Python access to the path-dependent HJB workbench.

Scenarios are the same JSON documents the ``phjb`` tool reads.
"""

import json
from os import PathLike
from typing import Any, Optional, Sequence, Union

from ._phjb import ParseError, ValidationError, __version__, check_kinds, gauge_S
from . import _phjb

Config = Union[str, PathLike, dict]


def _text(config: Config) -> str:
    if isinstance(config, dict):
        return json.dumps(config)
    try:
        with open(config, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"{config}: cannot open") from exc


def run(config: Config, checks: Optional[Sequence[str]] = None,
        grid: Optional[str] = None, seed: Optional[int] = None) -> dict[str, Any]:
    """Run the declared checks (or ``checks``) and return the report as a dict."""
    return json.loads(_phjb.run_json(_text(config), list(checks) if checks else None, grid, seed))


def value(config: Config, grid: Optional[str] = None) -> float:
    return _phjb.value(_text(config), grid)


def to_csv(report: dict[str, Any]) -> str:
    return _phjb.report_csv(json.dumps(report))


__all__ = ["ParseError", "ValidationError", "__version__", "check_kinds", "gauge_S",
           "run", "value", "to_csv"]
