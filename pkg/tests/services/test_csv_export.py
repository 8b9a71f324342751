import math
import os

import pytest

from decoupled_renewal.errors import OutputError
from decoupled_renewal.services.csv_export import CsvExporter, format_value, parse_value


@pytest.mark.parametrize(
    "value, expected",
    [
        (True, "1"),
        (12, "12"),
        (0.1, "0.10000000000000001"),
        (float("inf"), "inf"),
        (float("-inf"), "-inf"),
        (float("nan"), "nan"),
        ("gamma(shape=1)", "gamma(shape=1)"),
    ],
)
def test_format_value(value, expected):
    assert format_value(value) == expected


@pytest.mark.parametrize("value", [math.pi, -1e-300, 2.0**-1074, 123456789.123456789])
def test_float_text_parses_to_same_double(value):
    assert parse_value(format_value(value)) == value


class TestCsvExporter:
    @pytest.fixture(autouse=True)
    def initialize(self, injector, tmp_path):
        self.exporter = injector.get(CsvExporter)
        self.path = str(tmp_path / "out" / "study.csv")

    def test_layout(self):
        self.exporter.emit_csv(
            [{"t": 1.5, "k": 2, "value": -math.inf}],
            self.path,
            columns=["t", "k", "value"],
            metadata={"study": "forrester", "seed": "0"},
        )
        with open(self.path, newline="", encoding="utf-8") as f:
            text = f.read()
        assert text == "# study=forrester; seed=0\nt,k,value\r\n1.5,2,-inf\r\n"

    def test_read_back(self):
        rows = [{"t": 0.25, "name": "a,b"}, {"t": float("nan"), "name": "c"}]
        self.exporter.emit_csv(rows, self.path, metadata={"complete": "false"})
        metadata, read = self.exporter.read_csv(self.path)
        assert metadata == {"complete": "false"}
        assert read[0] == {"t": 0.25, "name": "a,b"}
        assert math.isnan(read[1]["t"])

    def test_header_only(self):
        self.exporter.emit_csv([], self.path, columns=["t", "value"])
        metadata, rows = self.exporter.read_csv(self.path)
        assert metadata == {}
        assert rows == []
        with open(self.path, encoding="utf-8") as f:
            assert f.read().strip() == "t,value"

    def test_missing_columns_are_blank(self):
        self.exporter.emit_csv([{"t": 1}], self.path, columns=["t", "extra"])
        _, rows = self.exporter.read_csv(self.path)
        assert rows == [{"t": 1, "extra": ""}]

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("not a directory")
        with pytest.raises(OutputError):
            self.exporter.emit_csv([{"t": 1}], os.path.join(str(blocker), "study.csv"))

    def test_unreadable(self, tmp_path):
        with pytest.raises(OutputError):
            self.exporter.read_csv(str(tmp_path / "missing.csv"))
