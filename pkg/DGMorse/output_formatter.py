"""
Output formatter for command reports
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from .exceptions import ConfigurationError

FORMATS = ("json", "text")


def plain(value: Any) -> Any:
    """numpy scalars and arrays as plain Python values"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


def frame_records(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    """A DataFrame (index included) as JSON-ready row records."""
    if frame.index.name is not None:
        frame = frame.reset_index()
    frame = frame.rename(columns=str)
    return [plain(row) for row in frame.to_dict(orient="records")]


class OutputFormatter:
    """Render reports as JSON documents or aligned text tables"""

    def __init__(self, config: Any):
        self.config = config
        self.logger = logging.getLogger(__name__)

    def emit_report(self, report: Dict[str, Any], fmt: str = "json") -> bytes:
        if fmt not in FORMATS:
            raise ConfigurationError(f"unknown output format {fmt!r} (expected one of {', '.join(FORMATS)})")
        if fmt == "json":
            return self.format_json(report).encode("utf-8")
        return self.format_text(report).encode("utf-8")

    def format_json(self, report: Dict[str, Any]) -> str:
        return json.dumps(plain(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def format_text(self, report: Dict[str, Any]) -> str:
        if not report:
            return "\n"
        lines = []
        header = [f"{key}: {report[key]}" for key in ("command", "status", "seed") if key in report]
        if header:
            lines.append("  ".join(header))
        for name, rows in report.get("tables", {}).items():
            lines.append("")
            lines.append(f"[{name}]")
            lines.append(self.format_table(rows))
        checks = report.get("checks", [])
        if checks:
            lines.append("")
            lines.append("checks:")
            for check in checks:
                lines.extend(self.format_check(check, 1))
        if report.get("timings"):
            lines.append("")
            lines.append("timings:")
            for name, seconds in sorted(report["timings"].items()):
                lines.append(f"  {name}: {seconds:.3f}s")
        return "\n".join(lines) + "\n"

    def format_table(self, rows: List[Dict[str, Any]]) -> str:
        if not rows:
            return "(empty)"
        return pd.DataFrame(rows).to_string(index=False)

    def format_check(self, check: Dict[str, Any], depth: int) -> List[str]:
        """One line per check, nested checks indented, failures followed by their witness"""
        indent = "  " * depth
        line = f"{indent}{check.get('status', '?').upper():4}  {check.get('check', '')}"
        if check.get("message"):
            line += f"  {check['message']}"
        lines = [line]
        if check.get("witness"):
            lines.append(f"{indent}      witness: {json.dumps(plain(check['witness']), sort_keys=True, ensure_ascii=False)}")
        for sub in check.get("checks", []):
            lines.extend(self.format_check(sub, depth + 1))
        return lines

    def export_to_json(self, report: Dict[str, Any], output_path: Path):
        """Export a report to a JSON file"""
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(self.format_json(report), encoding="utf-8")
        self.logger.info(f"Report written to {output_path}")

    def export_to_text(self, report: Dict[str, Any], output_path: Path):
        """Export a report to a text file"""
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(self.format_text(report), encoding="utf-8")
        self.logger.info(f"Report written to {output_path}")
