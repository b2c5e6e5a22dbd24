"""Record live service responses as JSON fixtures for the UI tests.

Run from the repository root after installing the Python package:

    python3 frontend/scripts/record_fixtures.py
"""

import io
import json
from pathlib import Path

from fastapi.testclient import TestClient

from honvis.analytics import analytics_report
from honvis.fixtures import MERGE_PORTS_CSV, merge_trajectories
from honvis.honbuild import build_fon, build_hon
from honvis.ingest import parse_ports
from honvis.layout import force_layout
from honvis.service import NetworkBundle, create_app
from honvis.service.bundle import BuildParams

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main() -> None:
    ts = merge_trajectories()
    fon = build_fon(ts)
    hon = build_hon(ts, min_support=3)
    bundle = NetworkBundle(
        fon=fon, hon=hon,
        build_params=BuildParams(max_order=5, min_support=3,
                                 threshold_spec="dynamic", max_gap_days=None),
        ports=parse_ports(io.StringIO(MERGE_PORTS_CSV)),
        analytics=analytics_report(fon, hon),
        scatter=force_layout(hon, seed=0))
    client = TestClient(create_app(bundle))

    def save(name: str, resp) -> dict:
        assert resp.status_code in (200, 201), (name, resp.text)
        payload = resp.json()
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path.name}")
        return payload

    save("summary", client.get("/api/summary"))
    save("ports", client.get("/api/ports"))
    for port in "ABMXY":
        save(f"port_detail_{port}", client.get(f"/api/ports/{port}"))
    save("dependency_M", client.get("/api/ports/M/dependency"))
    for net in ("fon", "hon", "delta"):
        save(f"pagerank_{net}", client.get(f"/api/pagerank?net={net}"))
    save("communities", client.get("/api/communities"))
    save("layout", client.get("/api/layout"))
    save("aggregation", client.get("/api/aggregation"))
    made = save("session_create", client.post("/api/sessions",
                                              json={"seeds": ["M|A"]}))
    sid = made["session_id"]
    save("step_1", client.post(f"/api/sessions/{sid}/trace"))
    save("session_after_step", client.get(f"/api/sessions/{sid}"))
    save("histogram_MA_X", client.get("/api/transitions/histogram",
                                      params={"src": "M|A", "dst": "X"}))


if __name__ == "__main__":
    main()
