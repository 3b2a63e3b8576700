"""
Test suite for the exporters module.

Tests report export to JSON, CSV and text files.
"""

import json
from unittest.mock import mock_open, patch

import pandas as pd
import pytest

from src.errors import InputError
from src.exporters import (
    CSVExporter,
    JSONExporter,
    ReportExporterFactory,
    TextExporter,
    report_records,
)


class TestJSONExporter:
    """Test cases for JSONExporter class."""

    def setup_method(self):
        """Set up test fixtures."""
        self.exporter = JSONExporter()

    @patch("pathlib.Path.mkdir")
    @patch("builtins.open", new_callable=mock_open)
    def test_export_json_opens_file(self, mock_file, mock_mkdir, sample_report):
        """Test that the file is opened for writing in UTF-8."""
        result_path = self.exporter.export(sample_report, "report.json")

        mock_file.assert_called_once()
        call_args = mock_file.call_args
        assert call_args[0][0].name == "report.json"
        assert call_args[0][1] == "w"
        assert call_args[1]["encoding"] == "utf-8"
        mock_mkdir.assert_called_once_with(parents=True, exist_ok=True)
        assert result_path.endswith("report.json")

    def test_export_json_content(self, tmp_path, sample_report):
        """Test that the report is wrapped with a timestamp."""
        path = self.exporter.export(sample_report, str(tmp_path / "out" / "report"))

        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)

        assert path.endswith("report.json"), "Extension is added when missing"
        assert "export_timestamp" in data
        assert data["report"] == sample_report


class TestCSVExporter:
    """Test cases for CSVExporter class."""

    def setup_method(self):
        """Set up test fixtures."""
        self.exporter = CSVExporter()

    def test_export_records(self, tmp_path, sample_report):
        """Test that the records table becomes the CSV rows."""
        path = self.exporter.export(sample_report, str(tmp_path / "report.csv"))
        frame = pd.read_csv(path)

        assert list(frame.columns) == ["axiom", "holds", "checked"]
        assert frame["axiom"].tolist() == ["swap-monotonicity", "anonymity"]
        assert frame["checked"].tolist() == [12, 6]

    def test_rationals_stay_exact(self, tmp_path):
        """Test that rational strings are written verbatim."""
        report = {"records": [{"weight": "1/3", "permutation": "1->a 2->b"}]}
        path = self.exporter.export(report, str(tmp_path / "bvn"))

        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()

        assert lines == ["weight,permutation", "1/3,1->a 2->b"]

    def test_nested_values_are_flattened(self, tmp_path):
        """Test dotted columns for nested mappings."""
        report = {"records": [{"axiom": "symmetry", "domain": {"kind": "exhaustive", "n": 3}}]}
        frame = pd.read_csv(self.exporter.export(report, str(tmp_path / "nested.csv")))

        assert "domain.kind" in frame.columns
        assert frame["domain.n"].tolist() == [3]


class TestTextExporter:
    """Test cases for TextExporter class."""

    def test_export_text(self, tmp_path, sample_report):
        """Test that the rendered text is written with a final newline."""
        path = TextExporter().export(sample_report, str(tmp_path / "report"))

        with open(path, encoding="utf-8") as handle:
            content = handle.read()

        assert path.endswith("report.txt")
        assert content == "swap-monotonicity: HOLDS (6 profiles, 12 transitions)\n"

    def test_export_without_text(self, tmp_path):
        """Test the key: value fallback."""
        path = TextExporter().export({"verdict": "infeasible", "branches": 3}, str(tmp_path / "s.txt"))

        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()

        assert lines == ['verdict: "infeasible"', "branches: 3"]


class TestReportRecords:
    """Test cases for report_records."""

    def test_records_preferred(self, sample_report):
        """Test that a records table is returned as is."""
        assert report_records(sample_report) == sample_report["records"]

    def test_scalar_fallback(self):
        """Test one row of scalar fields without a records table."""
        report = {"theorem": 1, "success": True, "steps": [1, 2], "contradiction": {"node": "V"}}
        assert report_records(report) == [{"theorem": 1, "success": True}]


class TestReportExporterFactory:
    """Test cases for ReportExporterFactory class."""

    @pytest.mark.parametrize(
        "format_type, exporter_type",
        [("json", JSONExporter), ("CSV", CSVExporter), (".txt", TextExporter)],
    )
    def test_create_exporter(self, format_type, exporter_type):
        """Test creating each supported exporter."""
        assert isinstance(ReportExporterFactory.create_exporter(format_type), exporter_type)

    def test_create_unsupported_exporter(self):
        """Test that unknown formats are rejected."""
        with pytest.raises(InputError, match="Unsupported format"):
            ReportExporterFactory.create_exporter("xml")

    def test_for_path(self):
        """Test choosing the exporter by suffix."""
        assert isinstance(ReportExporterFactory.for_path("out/report.csv"), CSVExporter)
        with pytest.raises(InputError):
            ReportExporterFactory.for_path("report")

    def test_get_supported_formats(self):
        """Test getting supported formats."""
        assert ReportExporterFactory.get_supported_formats() == ["json", "csv", "txt"]
