"""Report writers for CSV tables and JSON results."""
import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Union

import pandas as pd

from app.core.constants import TOOL_NAME, TOOL_VERSION


def finite_json(value: Any) -> Any:
    """Replace non-finite floats by the strings "inf", "-inf" and "nan"."""
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, Mapping):
        return {str(k): finite_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [finite_json(v) for v in value]
    return value


def config_line(config: Mapping[str, Any]) -> str:
    return json.dumps(finite_json(dict(config)), sort_keys=True, separators=(",", ":"))


class ReportWriter:
    """Writes results to a file, or to stdout when no path is given.

    CSV tables start with ``# tool=`` and ``# config=`` comment lines; JSON
    documents are {tool, version, config, result} with sorted keys.
    """

    def __init__(self, output: Optional[Union[str, Path]] = None,
                 stream: Optional[TextIO] = None):
        self.output = Path(output) if output else None
        self.stream = stream

    def _emit(self, text: str) -> None:
        if self.output is not None:
            self.output.write_text(text, encoding="utf-8")
        else:
            (self.stream or sys.stdout).write(text)

    @staticmethod
    def render_header(config: Mapping[str, Any], extra: Optional[Mapping[str, Any]] = None) -> str:
        header = f"# tool={TOOL_NAME} {TOOL_VERSION}\n# config={config_line(config)}\n"
        for key, value in (extra or {}).items():
            header += f"# {key}={value}\n"
        return header

    def render_csv(self, rows: Iterable[Mapping[str, Any]], columns: Sequence[str],
                   config: Mapping[str, Any], extra: Optional[Mapping[str, Any]] = None) -> str:
        frame = pd.DataFrame([dict(r) for r in rows], columns=list(columns))
        return self.render_header(config, extra) + frame.to_csv(index=False, lineterminator="\n")

    def render_json(self, result: Any, config: Mapping[str, Any]) -> str:
        document = {"tool": TOOL_NAME, "version": TOOL_VERSION,
                    "config": finite_json(dict(config)), "result": finite_json(result)}
        return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write_csv(self, rows: List[Dict[str, Any]], columns: Sequence[str],
                  config: Mapping[str, Any], extra: Optional[Mapping[str, Any]] = None) -> None:
        self._emit(self.render_csv(rows, columns, config, extra))

    def write_text(self, text: str) -> None:
        self._emit(text)

    def write_json(self, result: Any, config: Mapping[str, Any]) -> None:
        self._emit(self.render_json(result, config))
