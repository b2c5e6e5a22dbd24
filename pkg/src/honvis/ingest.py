"""Parse port metadata and voyage records into per-ship trajectories.

Trajectories are the raw event sequences from which both the first-order and
the higher-order network are built. Port rows are trusted (hard errors),
voyage rows are treated as dirty AIS-style data (skipped with a reject
report).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, TextIO

from .errors import DataError

PORT_HEADER = ["port_id", "name", "lat", "lon", "country", "eco_realm",
               "temperature", "salinity", "freshwater"]
VOYAGE_HEADER = ["ship_id", "ship_type", "src_port", "dst_port",
                 "depart_time", "arrive_time"]

_TRUE = {"true", "t", "1", "yes", "y"}
_FALSE = {"false", "f", "0", "no", "n"}


@dataclass(frozen=True)
class PortRecord:
    port_id: str
    name: str
    lat: float
    lon: float
    country: str
    eco_realm: str
    temperature: float
    salinity: float
    freshwater: bool


@dataclass
class PortTable:
    ports: dict[str, PortRecord] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.ports)

    def __contains__(self, port_id: str) -> bool:
        return port_id in self.ports

    def __getitem__(self, port_id: str) -> PortRecord:
        return self.ports[port_id]

    def __iter__(self):
        return iter(self.ports.values())


@dataclass(frozen=True)
class Voyage:
    ship_id: str
    ship_type: str
    src_port: str
    dst_port: str
    depart_time: datetime
    arrive_time: datetime


@dataclass
class VoyageSet:
    voyages: list[Voyage] = field(default_factory=list)
    rejects: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.voyages)

    def rejects_report(self) -> str:
        """Line-oriented reject report: one ``line_no,reason`` per skipped row."""
        return "".join(f"{line_no},{reason}\n" for line_no, reason in self.rejects)


@dataclass(frozen=True)
class Hop:
    """One visited port plus the metadata of the voyage departing it.

    The final hop of a trajectory has nothing departing it; it carries the
    metadata of the voyage that arrived there so no hop is metadata-free.
    """

    port: str
    ship_type: str
    month: int


@dataclass
class Trajectory:
    ship_id: str
    hops: list[Hop]

    @property
    def ports(self) -> list[str]:
        return [h.port for h in self.hops]

    def __len__(self) -> int:
        return len(self.hops)


@dataclass
class TrajectorySet:
    trajectories: list[Trajectory] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.trajectories)

    def __iter__(self):
        return iter(self.trajectories)

    def total_transitions(self) -> int:
        return sum(len(t) - 1 for t in self.trajectories)

    def to_jsonl(self) -> str:
        lines = []
        for t in self.trajectories:
            lines.append(json.dumps(
                {"ship_id": t.ship_id,
                 "hops": [[h.port, h.ship_type, h.month] for h in t.hops]},
                sort_keys=True, separators=(",", ":")))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text: str) -> "TrajectorySet":
        out = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            out.trajectories.append(Trajectory(
                ship_id=rec["ship_id"],
                hops=[Hop(p, s, m) for p, s, m in rec["hops"]]))
        return out


def _open_stream(source: TextIO | str | Path) -> TextIO:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline="")
    return source


def _check_header(row: list[str] | None, expected: list[str], what: str) -> None:
    if row is None or [c.strip() for c in row] != expected:
        raise DataError(f"{what} CSV header must be exactly {','.join(expected)}")


def parse_ports(source: TextIO | str | Path) -> PortTable:
    """Parse the port metadata CSV into a table keyed by port_id.

    Port rows are authoritative reference data, so every defect is a hard
    error: duplicate ids, unparsable or out-of-range coordinates, empty
    eco-realm labels.
    """
    stream = _open_stream(source)
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        _check_header(header, PORT_HEADER, "port")
        table = PortTable()
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(PORT_HEADER):
                raise DataError(f"line {line_no}: expected {len(PORT_HEADER)} columns, got {len(row)}")
            port_id, name, lat_s, lon_s, country, eco_realm, temp_s, sal_s, fresh_s = \
                (c.strip() for c in row)
            if port_id in table:
                raise DataError(f"duplicate port {port_id!r} at line {line_no}")
            try:
                lat, lon = float(lat_s), float(lon_s)
            except ValueError:
                raise DataError(f"line {line_no}: unparsable lat/lon {lat_s!r},{lon_s!r}") from None
            if not -90.0 <= lat <= 90.0:
                raise DataError(f"line {line_no}: lat {lat} out of range [-90,90]")
            if not -180.0 <= lon <= 180.0:
                raise DataError(f"line {line_no}: lon {lon} out of range [-180,180]")
            if not eco_realm:
                raise DataError(f"line {line_no}: empty eco_realm for port {port_id!r}")
            try:
                temperature, salinity = float(temp_s), float(sal_s)
            except ValueError:
                raise DataError(f"line {line_no}: unparsable temperature/salinity") from None
            fresh_l = fresh_s.lower()
            if fresh_l in _TRUE:
                freshwater = True
            elif fresh_l in _FALSE:
                freshwater = False
            else:
                raise DataError(f"line {line_no}: unparsable freshwater flag {fresh_s!r}")
            table.ports[port_id] = PortRecord(
                port_id, name, lat, lon, country, eco_realm,
                temperature, salinity, freshwater)
        return table
    finally:
        if isinstance(source, (str, Path)):
            stream.close()


def _parse_time(text: str) -> datetime:
    # ISO-8601; python 3.10's fromisoformat rejects trailing 'Z'
    dt = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    if dt.tzinfo is not None:
        dt = (dt - dt.utcoffset()).replace(tzinfo=None)
    return dt


def parse_voyages(source: TextIO | str | Path, port_table: PortTable) -> VoyageSet:
    """Parse voyage rows, skipping dirty ones into a counted reject report.

    Skips (rather than fails) rows with unknown ports, malformed times,
    identical endpoints, or arrival before departure; real movement feeds are
    dirty and determinism is preserved because skipping is content-based.
    """
    stream = _open_stream(source)
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        _check_header(header, VOYAGE_HEADER, "voyage")
        out = VoyageSet()
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(VOYAGE_HEADER):
                out.rejects.append((line_no, "bad column count"))
                continue
            ship_id, ship_type, src, dst, dep_s, arr_s = (c.strip() for c in row)
            if src not in port_table:
                out.rejects.append((line_no, f"unknown port {src}"))
                continue
            if dst not in port_table:
                out.rejects.append((line_no, f"unknown port {dst}"))
                continue
            if src == dst:
                out.rejects.append((line_no, "src equals dst"))
                continue
            try:
                depart, arrive = _parse_time(dep_s), _parse_time(arr_s)
            except ValueError:
                out.rejects.append((line_no, "malformed time"))
                continue
            if depart > arrive:
                out.rejects.append((line_no, "departure after arrival"))
                continue
            out.voyages.append(Voyage(ship_id, ship_type, src, dst, depart, arrive))
        return out
    finally:
        if isinstance(source, (str, Path)):
            stream.close()


def build_trajectories(voyage_set: VoyageSet,
                       max_gap_days: float | None = None) -> TrajectorySet:
    """Chain each ship's voyages into port sequences, splitting on discontinuities.

    Voyages are sorted per ship by departure time and chained src->dst. A new
    trajectory starts whenever the previous destination is not the next source
    or (if ``max_gap_days`` is set) the idle gap exceeds it. Consecutive
    duplicate ports are collapsed; hops keep the metadata of the voyage
    departing them (month = departure month).
    """
    by_ship: dict[str, list[Voyage]] = {}
    for v in voyage_set.voyages:
        by_ship.setdefault(v.ship_id, []).append(v)

    out = TrajectorySet()
    for ship_id in sorted(by_ship):
        voyages = sorted(by_ship[ship_id],
                         key=lambda v: (v.depart_time, v.arrive_time))
        hops: list[Hop] = []
        prev: Voyage | None = None

        def flush() -> None:
            if len(hops) >= 2:
                out.trajectories.append(Trajectory(ship_id, list(hops)))

        for v in voyages:
            gap_exceeded = (
                prev is not None and max_gap_days is not None
                and (v.depart_time - prev.arrive_time).total_seconds()
                > max_gap_days * 86400.0)
            if prev is None or prev.dst_port != v.src_port or gap_exceeded:
                flush()
                hops = [Hop(v.src_port, v.ship_type, v.depart_time.month)]
            else:
                # re-stamp the junction hop with the voyage now departing it
                hops[-1] = Hop(hops[-1].port, v.ship_type, v.depart_time.month)
            if hops and v.dst_port == hops[-1].port:
                hops[-1] = Hop(hops[-1].port, v.ship_type, v.depart_time.month)
            else:
                hops.append(Hop(v.dst_port, v.ship_type, v.depart_time.month))
            prev = v
        flush()
    return out


def write_rejects(voyage_set: VoyageSet, path: str | Path) -> None:
    Path(path).write_text(voyage_set.rejects_report(), encoding="utf-8")


def read_csv_text(text: str) -> TextIO:
    """Wrap a CSV string for the parse_* functions (test/fixture convenience)."""
    return io.StringIO(text)
