"""
CSV output of the studies. Files start with one '#' comment line of
`key=value` metadata, then an RFC 4180 header row and the data rows.
Floats are written with 17 significant digits, so they parse back to the
same double.
"""
import csv
import math
import os
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from injector import singleton

from decoupled_renewal.errors import OutputError
from decoupled_renewal.util import AppLoggerMixIn

COMMENT_PREFIX = "# "


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    return str(value)


def parse_value(text: str) -> Any:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


@singleton
class CsvExporter(AppLoggerMixIn):
    def emit_csv(
        self,
        rows: Iterable[Mapping[str, Any]],
        path: str,
        columns: Optional[Sequence[str]] = None,
        metadata: Optional[Mapping[str, str]] = None,
    ) -> str:
        rows = list(rows)
        if columns is None:
            columns = list(rows[0]) if rows else []
        directory = os.path.dirname(os.path.abspath(path))
        try:
            os.makedirs(directory, exist_ok=True)
            with open(path, "w", newline="", encoding="utf-8") as f:
                if metadata:
                    f.write(
                        COMMENT_PREFIX
                        + "; ".join(f"{key}={value}" for key, value in metadata.items())
                        + "\n"
                    )
                writer = csv.writer(f, lineterminator="\r\n")
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([format_value(row.get(column, "")) for column in columns])
        except OSError as e:
            raise OutputError(path, str(e)) from e
        self.logger.info(f"wrote {len(rows)} rows to {path}")
        return path

    @staticmethod
    def read_csv(path: str) -> Tuple[Dict[str, str], List[Dict[str, Any]]]:
        """(metadata, rows) of a file written by emit_csv."""
        metadata: Dict[str, str] = {}
        try:
            with open(path, newline="", encoding="utf-8") as f:
                first = f.readline()
                if first.startswith(COMMENT_PREFIX.strip()):
                    for item in first[len(COMMENT_PREFIX) :].strip().split("; "):
                        if item:
                            key, _, value = item.partition("=")
                            metadata[key] = value
                else:
                    f.seek(0)
                reader = csv.DictReader(f)
                rows = [
                    {key: parse_value(value) for key, value in row.items()} for row in reader
                ]
        except OSError as e:
            raise OutputError(path, str(e)) from e
        return metadata, rows
