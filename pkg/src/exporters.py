"""
Report export implementation.

This module writes the JSON-ready reports produced by the command line to
files, following the Single Responsibility Principle.
"""

from datetime import datetime
import json
from pathlib import Path
from typing import Any, Callable, Dict, List

import pandas as pd

from .errors import InputError
from .interfaces import IReportExporter

# Reports may carry a flat table under this key (one record per verdict,
# step or node); tabular exporters prefer it over the whole mapping.
RECORDS_KEY = "records"


def _target(filename: str, suffix: str) -> Path:
    if not filename.endswith(suffix):
        filename += suffix
    filepath = Path(filename)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    return filepath


def report_records(report: Dict[str, Any]) -> List[Dict[str, Any]]:
    """
    Flat rows of a report.

    Returns:
        The report's records when present, otherwise one row with every
        scalar field of the report
    """
    records = report.get(RECORDS_KEY)
    if isinstance(records, list) and records:
        return [dict(record) for record in records]
    return [{k: v for k, v in report.items() if not isinstance(v, (list, dict))}]


class JSONExporter(IReportExporter):
    """Exports reports to JSON format."""

    def export(self, report: Dict[str, Any], filename: str) -> str:
        """
        Export a report to a JSON file.

        Args:
            report: Report mapping
            filename: Output filename

        Returns:
            Path to exported file
        """
        filepath = _target(filename, ".json")
        output = {
            "export_timestamp": datetime.now().isoformat(),
            "report": report,
        }
        with open(filepath, "w", encoding="utf-8") as jsonfile:
            json.dump(output, jsonfile, indent=2, ensure_ascii=False)
        return str(filepath.absolute())


class CSVExporter(IReportExporter):
    """Exports the tabular part of a report to CSV format."""

    def export(self, report: Dict[str, Any], filename: str) -> str:
        """
        Export report records to a CSV file.

        Nested values are flattened into dotted columns; rationals stay
        strings so nothing is rounded.

        Args:
            report: Report mapping
            filename: Output filename

        Returns:
            Path to exported file
        """
        filepath = _target(filename, ".csv")
        frame = pd.json_normalize(report_records(report))
        frame.to_csv(filepath, index=False, encoding="utf-8")
        return str(filepath.absolute())


class TextExporter(IReportExporter):
    """Exports the human-readable rendering of a report."""

    def export(self, report: Dict[str, Any], filename: str) -> str:
        """Write report['text'] when present, else one key: value per line."""
        filepath = _target(filename, ".txt")
        text = report.get("text")
        if not isinstance(text, str):
            text = "\n".join(
                f"{key}: {json.dumps(value, ensure_ascii=False)}"
                for key, value in report.items()
            )
        filepath.write_text(text.rstrip("\n") + "\n", encoding="utf-8")
        return str(filepath.absolute())


class ReportExporterFactory:
    """Factory for creating appropriate report exporters."""

    _exporters: Dict[str, Callable[[], IReportExporter]] = {
        "json": JSONExporter,
        "csv": CSVExporter,
        "txt": TextExporter,
    }

    @classmethod
    def create_exporter(cls, format_type: str) -> IReportExporter:
        """
        Create an exporter for the specified format.

        Args:
            format_type: Export format ('json', 'csv', 'txt')

        Returns:
            Appropriate exporter instance

        Raises:
            InputError: If format is not supported
        """
        format_type = format_type.lower().lstrip(".")
        if format_type not in cls._exporters:
            supported_formats = ", ".join(cls._exporters.keys())
            raise InputError(
                f"Unsupported format '{format_type}'. Supported formats: {supported_formats}"
            )
        return cls._exporters[format_type]()

    @classmethod
    def for_path(cls, path: str) -> IReportExporter:
        """Exporter chosen by the file suffix of path."""
        suffix = Path(path).suffix
        if not suffix:
            raise InputError(f"Cannot infer an export format from '{path}'")
        return cls.create_exporter(suffix)

    @classmethod
    def get_supported_formats(cls) -> List[str]:
        """
        Get list of supported export formats.

        Returns:
            List of supported format strings
        """
        return list(cls._exporters.keys())
