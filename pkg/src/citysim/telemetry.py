"""Append-only telemetry store with fixed per-table schemas.

Every subsystem writes rows here instead of keeping its own history.
Rows hold pre-formatted strings so CSV and JSON exports are trivially
row-equivalent; the date/time columns come from the simulation epoch
plus the virtual clock, never from the host's wall clock.
"""

from __future__ import annotations

import csv
import json
import os

from .errors import SchemaMismatchError, UnknownTableError
from .kernel import Kernel

SCHEMAS: dict[str, tuple[str, ...]] = {
    "streetlight": ("date", "time", "light1", "light2", "light3", "light4",
                    "light5", "light6", "light7", "light8"),
    "home_alarm": ("date", "time", "thief_alarm", "fire_alarm"),
    "home_appliance": ("date", "time", "appliance", "new_state"),
    "door": ("date", "time", "result"),
    "traffic": ("date", "time", "road", "signal"),
    "plate": ("date", "time", "road", "plate", "verdict"),
    "private_parking": ("date", "time", "card_result"),
    "smart_parking": ("date", "time", "slot", "occupied"),
    "info_env": ("date", "time", "temp_c", "rh_pct"),
    "info_notice": ("date", "time", "text"),
    "accident": ("date", "time", "kind", "lat", "lon"),
}


class Telemetry:
    def __init__(self, kernel: Kernel):
        self.kernel = kernel
        self.tables: dict[str, list[dict[str, str]]] = {t: [] for t in SCHEMAS}

    def _stamp(self) -> tuple[str, str]:
        wall = self.kernel.config.wall_datetime(self.kernel.now())
        ms = self.kernel.now() % 1000
        return wall.strftime("%Y-%m-%d"), wall.strftime("%H:%M:%S") + f".{ms:03d}"

    def record(self, table: str, **values: str) -> dict[str, str]:
        if table not in SCHEMAS:
            raise UnknownTableError(f"no telemetry table named {table!r}")
        schema = SCHEMAS[table]
        expected = set(schema) - {"date", "time"}
        got = set(values)
        if got != expected:
            raise SchemaMismatchError(
                f"table {table!r} expects columns {sorted(expected)}, got {sorted(got)}"
            )
        bad = [k for k, v in values.items() if not isinstance(v, str)]
        if bad:
            raise SchemaMismatchError(
                f"table {table!r} values must be preformatted strings; "
                f"non-string columns: {sorted(bad)}"
            )
        date, time = self._stamp()
        row = {"date": date, "time": time}
        for col in schema[2:]:
            row[col] = values[col]
        self.tables[table].append(row)
        return row

    def rows(self, table: str) -> list[dict[str, str]]:
        if table not in SCHEMAS:
            raise UnknownTableError(f"no telemetry table named {table!r}")
        return list(self.tables[table])

    def export_csv(self, out_dir: str) -> list[str]:
        """One RFC-4180 file per table, LF line endings, header first."""
        os.makedirs(out_dir, exist_ok=True)
        written = []
        for table in SCHEMAS:
            path = os.path.join(out_dir, f"{table}.csv")
            with open(path, "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=SCHEMAS[table],
                                        lineterminator="\n")
                writer.writeheader()
                writer.writerows(self.tables[table])
            written.append(path)
        return written

    def export_json(self, path: str) -> str:
        """Consolidated dump: every table present even when empty."""
        payload = {table: self.tables[table] for table in SCHEMAS}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        return path
