"""Bundle persistence, session store, and the HTTP API."""

import io
import json
import threading
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

from honvis.analytics import analytics_report
from honvis.errors import DataError
from honvis.fixtures import MERGE_PORTS_CSV, merge_trajectories
from honvis.honbuild import build_fon, build_hon
from honvis.ingest import Hop, Trajectory, TrajectorySet, parse_ports
from honvis.layout import dependency_layout, force_layout
from honvis.service import (FORMAT_VERSION, NetworkBundle, SessionStore,
                            create_app, export_bundle, import_bundle)
from honvis.service.bundle import bundle_from_dict, bundle_to_dict
from honvis.service.schemas import SCHEMAS, schema_text
from honvis.subgraph import SubgraphSession, init_session, trace_step

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "docs" / "schemas"

MERGE = merge_trajectories()
FON = build_fon(MERGE)
HON = build_hon(MERGE, min_support=3)
PORTS = parse_ports(io.StringIO(MERGE_PORTS_CSV))


def merge_bundle(with_analytics=False, with_scatter=False) -> NetworkBundle:
    return NetworkBundle(
        fon=build_fon(MERGE), hon=build_hon(MERGE, min_support=3),
        build_params=HON.build_params,
        ports=parse_ports(io.StringIO(MERGE_PORTS_CSV)),
        analytics=analytics_report(FON, HON) if with_analytics else None,
        scatter=force_layout(HON, seed=4) if with_scatter else None)


def nid(label):
    return HON.node_by_label(label).node_id


class TestBundleRoundTrip:
    def test_structural_equality(self, tmp_path):
        bundle = merge_bundle(with_analytics=True, with_scatter=True)
        path = tmp_path / "b.json"
        export_bundle(bundle, path)
        assert import_bundle(path) == bundle

    def test_minimal_bundle_round_trips(self, tmp_path):
        bundle = merge_bundle()
        path = tmp_path / "b.json"
        export_bundle(bundle, path)
        again = import_bundle(path)
        assert again == bundle
        assert again.analytics is None and again.scatter is None

    def test_export_twice_is_byte_identical(self, tmp_path):
        bundle = merge_bundle(with_analytics=True, with_scatter=True)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        export_bundle(bundle, a)
        export_bundle(merge_bundle(with_analytics=True, with_scatter=True), b)
        assert a.read_bytes() == b.read_bytes()

    def test_version_mismatch_names_both_versions(self, tmp_path):
        d = bundle_to_dict(merge_bundle())
        d["format_version"] = "99"
        path = tmp_path / "b.json"
        path.write_text(json.dumps(d))
        with pytest.raises(DataError, match=r"expected '1', found '99'"):
            import_bundle(path)

    def test_dangling_edge_names_the_id(self, tmp_path):
        d = bundle_to_dict(merge_bundle())
        d["hon"]["edges"].append({"src": 0, "dst": 99, "weight": 1,
                                  "ship_types": {}, "months": {}})
        path = tmp_path / "b.json"
        path.write_text(json.dumps(d))
        with pytest.raises(DataError, match="99"):
            import_bundle(path)

    def test_dangling_metric_rejected(self):
        d = bundle_to_dict(merge_bundle(with_analytics=True))
        d["analytics"]["node_metrics"][0]["node_id"] = 42
        with pytest.raises(DataError, match="42"):
            bundle_from_dict(d)

    def test_garbage_file_rejected(self, tmp_path):
        path = tmp_path / "b.json"
        path.write_text("{not json")
        with pytest.raises(DataError, match="not valid JSON"):
            import_bundle(path)


class TestSessionStore:
    def test_ids_are_128_bit_hex(self):
        store = SessionStore()
        sid = store.create(SubgraphSession(direction="forward"))
        assert len(sid) == 32
        int(sid, 16)

    def test_lru_eviction_beyond_capacity(self):
        store = SessionStore(capacity=2)
        a = store.create(SubgraphSession(direction="forward"))
        b = store.create(SubgraphSession(direction="forward"))
        assert store.get(a) is not None  # refreshes a, making b oldest
        c = store.create(SubgraphSession(direction="forward"))
        assert store.get(b) is None
        assert store.get(a) is not None and store.get(c) is not None
        assert len(store) == 2

    def test_delete(self):
        store = SessionStore()
        sid = store.create(SubgraphSession(direction="forward"))
        assert store.delete(sid) is True
        assert store.delete(sid) is False
        assert store.get(sid) is None

    def test_concurrent_creates_respect_capacity(self):
        store = SessionStore(capacity=8)

        def spam():
            for _ in range(50):
                store.create(SubgraphSession(direction="forward"))

        threads = [threading.Thread(target=spam) for _ in range(6)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(store) == 8


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(merge_bundle()))


def check(resp, name, status=200):
    assert resp.status_code == status, resp.text
    payload = resp.json()
    schema = json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator(schema).validate(payload)
    return payload


class TestSchemasPublished:
    def test_shipped_files_match_models(self):
        for name, model in SCHEMAS.items():
            shipped = (SCHEMA_DIR / f"{name}.schema.json").read_text()
            assert shipped == schema_text(model), name


class TestSummary:
    def test_merge_summary(self, client):
        got = check(client.get("/api/summary"), "summary")
        assert got["ports"] == 5
        assert got["hon_nodes"] == 7
        assert got["max_order"] == 2
        assert got["fon_nodes"] == 5 and got["fon_edges"] == 4
        assert got["total_transitions"] == 20
        assert got["build_params"]["min_support"] == 3


class TestPortList:
    def test_default_sorted_by_name(self, client):
        got = check(client.get("/api/ports"), "ports")
        assert [p["port_id"] for p in got["ports"]] == ["A", "B", "M", "X", "Y"]
        assert got["total"] == 5
        m = next(p for p in got["ports"] if p["port_id"] == "M")
        assert m["hon_count"] == 3
        assert m["name"] == "Midway Hub"

    def test_hon_count_sort_puts_hub_first(self, client):
        got = check(client.get("/api/ports?sort=hon_count"), "ports")
        assert got["ports"][0]["port_id"] == "M"

    def test_delta_sort_descends(self, client):
        got = check(client.get("/api/ports?sort=pagerank_delta"), "ports")
        deltas = [p["pagerank_delta"] for p in got["ports"]]
        assert deltas == sorted(deltas, reverse=True)

    def test_offset_and_limit_paginate(self, client):
        got = check(client.get("/api/ports?offset=1&limit=2"), "ports")
        assert [p["port_id"] for p in got["ports"]] == ["B", "M"]
        assert got["total"] == 5

    def test_bbox_filters_by_coordinates(self, client):
        got = check(client.get("/api/ports?bbox=100,0,110,10"), "ports")
        assert [p["port_id"] for p in got["ports"]] == ["A", "X"]

    def test_bad_sort_is_400(self, client):
        check(client.get("/api/ports?sort=bogus"), "error", status=400)

    def test_malformed_bbox_is_400(self, client):
        check(client.get("/api/ports?bbox=1,2,3"), "error", status=400)
        check(client.get("/api/ports?bbox=a,b,c,d"), "error", status=400)

    def test_negative_offset_is_400(self, client):
        check(client.get("/api/ports?offset=-1"), "error", status=400)


class TestPortDetail:
    def test_hub_detail(self, client):
        got = check(client.get("/api/ports/M"), "port_detail")
        assert {n["label"] for n in got["hon_nodes"]} == {"M", "M|A", "M|B"}
        assert got["fon_in"] == {"A": 5, "B": 5}
        assert got["fon_out"] == {"X": 5, "Y": 5}

    def test_unknown_port_404(self, client):
        check(client.get("/api/ports/NOPE"), "error", status=404)


class TestDependencyEndpoint:
    def test_matches_library_layout(self, client):
        got = check(client.get("/api/ports/M/dependency"), "dependency")
        report = analytics_report(FON, HON)
        lib = dependency_layout(HON, report.node_metrics,
                                HON.nodes_for_port("M"))
        assert [(r["node_id"], r["y_slot"]) for r in got["middle"]] == \
            [(r.node_id, r.y_slot) for r in lib.middle]
        assert [(c["port_id"], c["y"]) for c in got["right"]] == \
            [(c.port_id, c.y) for c in lib.right]
        assert got["curves"][str(nid("M|A"))] == [[-1.0, 0.0], [0.0, 0.0]]

    def test_min_prob_filter_applies(self, client):
        got = check(client.get("/api/ports/M/dependency?min_prob=1.1"),
                    "dependency")
        assert got["edges"] == [] and got["right"] == []

    def test_right_order_attribute(self, client):
        got = check(
            client.get("/api/ports/M/dependency?right_order=temperature"),
            "dependency")
        # X at 29C, Y at 18C: ascending temperature puts Y first
        assert [c["port_id"] for c in got["right"]] == ["Y", "X"]

    def test_bad_right_order_400(self, client):
        check(client.get("/api/ports/M/dependency?right_order=bogus"),
              "error", status=400)

    def test_unknown_port_404(self, client):
        check(client.get("/api/ports/NOPE/dependency"), "error", status=404)


class TestPagerankEndpoint:
    def test_fon_scores_sum_to_one(self, client):
        got = check(client.get("/api/pagerank?net=fon"), "pagerank")
        assert abs(sum(got["scores"].values()) - 1.0) < 1e-8
        assert got["damping"] == 0.85

    def test_hon_carries_node_scores(self, client):
        got = check(client.get("/api/pagerank?net=hon"), "pagerank")
        assert abs(sum(got["scores"].values()) - 1.0) < 1e-8
        assert len(got["node_scores"]) == 7

    def test_delta_sums_to_zero(self, client):
        got = check(client.get("/api/pagerank?net=delta"), "pagerank")
        assert abs(sum(got["scores"].values())) < 1e-8

    def test_bad_net_400(self, client):
        check(client.get("/api/pagerank?net=bogus"), "error", status=400)


class TestCommunitiesEndpoint:
    def test_assignment_covers_all_nodes(self, client):
        got = check(client.get("/api/communities"), "communities")
        assert len(got["assignment"]) == 7
        assert sum(got["sizes"].values()) == 7


class TestLayoutEndpoint:
    def test_lazy_layout_is_deterministic(self, client):
        got = check(client.get("/api/layout"), "layout")
        assert len(got["coords"]) == 7
        again = client.get("/api/layout").json()
        assert again == got

    def test_bundled_layout_served_verbatim(self):
        bundle = merge_bundle(with_scatter=True)
        local = TestClient(create_app(bundle))
        got = check(local.get("/api/layout"), "layout")
        assert got["seed"] == 4
        assert got["coords"][str(nid("M"))] == list(bundle.scatter.coords[nid("M")])


class TestAggregationEndpoint:
    def test_exact_realm_rollup(self, client):
        got = check(client.get("/api/aggregation"), "aggregation")
        labels = {n["label"] for n in got["nodes"]}
        assert labels == {
            "Central Indo-Pacific", "Temperate Northern Pacific",
            "Central Indo-Pacific|Central Indo-Pacific",
            "Central Indo-Pacific|Temperate Northern Pacific"}
        assert got["total_edge_weight"] == 20
        assert len(got["sectors"]) == len(got["nodes"])

    def test_coarse_uses_sentinel(self, client):
        got = check(client.get("/api/aggregation?grouping=coarse"),
                    "aggregation")
        assert got["sentinel"] == "Different Eco-realm"
        assert any("Different Eco-realm" in n["label"] for n in got["nodes"])

    def test_session_filter_restricts_nodes(self, client):
        created = client.post("/api/sessions",
                              json={"seeds": ["M|A"], "direction": "forward"})
        sid = created.json()["session_id"]
        client.post(f"/api/sessions/{sid}/trace")
        got = check(client.get(f"/api/aggregation?session={sid}"),
                    "aggregation")
        members = {m for n in got["nodes"] for m in n["members"]}
        assert members == {nid("M|A"), nid("X")}

    def test_unknown_session_404(self, client):
        check(client.get("/api/aggregation?session=deadbeef"), "error",
              status=404)

    def test_bad_grouping_400(self, client):
        check(client.get("/api/aggregation?grouping=bogus"), "error",
              status=400)
        check(client.get("/api/aggregation?weight=bogus"), "error",
              status=400)


class TestSessionEndpoints:
    def test_create_trace_get_delete_cycle(self, client):
        got = check(client.post(
            "/api/sessions", json={"seeds": ["M|A"], "direction": "forward"}),
            "session", status=201)
        sid = got["session_id"]
        assert len(sid) == 32
        assert got["mass"] == {"M|A": 1.0}
        assert got["step_count"] == 0

        step = check(client.post(f"/api/sessions/{sid}/trace"), "step_report")
        assert step["step"] == 1
        assert step["newly_reached"] == ["X"]
        assert step["mass"] == {"X": 1.0}

        fetched = check(client.get(f"/api/sessions/{sid}"), "session")
        assert fetched["step_count"] == 1
        assert fetched["reached_ports"] == ["M", "X"]

        deleted = check(client.delete(f"/api/sessions/{sid}"), "delete")
        assert deleted == {"deleted": True}
        check(client.get(f"/api/sessions/{sid}"), "error", status=404)

    def test_trace_matches_library_exactly(self, client):
        created = client.post("/api/sessions",
                              json={"seeds": ["A", "B"],
                                    "direction": "forward"})
        sid = created.json()["session_id"]
        api_step = check(client.post(f"/api/sessions/{sid}/trace"),
                         "step_report")

        report = analytics_report(FON, HON)
        session = init_session(HON, [nid("A"), nid("B")], "forward",
                               communities=report.communities.assignment)
        lib_step = trace_step(session, HON)
        assert api_step["step"] == lib_step.step
        assert api_step["newly_reached"] == \
            [HON.nodes[i].label for i in lib_step.newly_reached]
        assert api_step["mass"] == \
            {HON.nodes[i].label: m for i, m in lib_step.mass.items()}
        assert api_step["reached_ports"] == sorted(lib_step.reached_ports)
        api_rows = [(r["node_id"], r["total"])
                    for r in api_step["top_contributors"]]
        lib_rows = [(r.node_id, r.total)
                    for r in lib_step.top_contributors.rows]
        assert api_rows == lib_rows

    def test_unknown_seed_label_404(self, client):
        check(client.post("/api/sessions",
                          json={"seeds": ["Z|Q"], "direction": "forward"}),
              "error", status=404)

    def test_empty_seeds_400(self, client):
        check(client.post("/api/sessions",
                          json={"seeds": [], "direction": "forward"}),
              "error", status=400)

    def test_bad_direction_400(self, client):
        check(client.post("/api/sessions",
                          json={"seeds": ["M|A"], "direction": "sideways"}),
              "error", status=400)

    def test_malformed_body_400(self, client):
        check(client.post("/api/sessions", json={"direction": "forward"}),
              "error", status=400)

    def test_trace_unknown_session_404(self, client):
        check(client.post("/api/sessions/ffff/trace"), "error", status=404)

    def test_capacity_evicts_through_api(self):
        local = TestClient(create_app(merge_bundle(), session_capacity=2))
        ids = []
        for _ in range(3):
            r = local.post("/api/sessions",
                           json={"seeds": ["M|A"], "direction": "forward"})
            ids.append(r.json()["session_id"])
        assert local.get(f"/api/sessions/{ids[0]}").status_code == 404
        assert local.get(f"/api/sessions/{ids[2]}").status_code == 200


class TestHistogramEndpoint:
    def test_edge_histograms(self, client):
        got = check(client.get("/api/transitions/histogram?src=M|A&dst=X"),
                    "histogram")
        assert got["total"] == 5
        assert got["ship_types"] == {"container": 3, "tanker": 2}
        assert got["months"] == {"1": 1, "2": 1, "3": 1, "4": 1, "5": 1}

    def test_port_level_source_works_too(self, client):
        got = check(client.get("/api/transitions/histogram?src=A&dst=M"),
                    "histogram")
        assert got["total"] == 5

    def test_absent_edge_yields_zeros(self, client):
        got = check(client.get("/api/transitions/histogram?src=M|A&dst=Y"),
                    "histogram")
        assert got == {"src": "M|A", "dst": "Y", "total": 0,
                       "ship_types": {}, "months": {}}

    def test_unknown_src_404(self, client):
        check(client.get("/api/transitions/histogram?src=Q|Z&dst=X"),
              "error", status=404)

    def test_missing_params_400(self, client):
        check(client.get("/api/transitions/histogram"), "error", status=400)


def cycle_bundle() -> NetworkBundle:
    walk = ["A", "B", "C"] * 4
    ts = TrajectorySet(trajectories=[
        Trajectory(f"s{i}", [Hop(p, "container", 1) for p in walk])
        for i in range(3)])
    hon = build_hon(ts, max_order=1)
    return NetworkBundle(fon=build_fon(ts), hon=hon,
                         build_params=hon.build_params)


class TestConcurrency:
    def test_mixed_reads_and_traces_stay_consistent(self):
        app = create_app(cycle_bundle())
        primer = TestClient(app)
        primer.get("/api/pagerank?net=hon")  # settle the lazy analytics flag
        baseline = primer.get("/api/summary").json()
        errors = []

        def worker(k):
            local = TestClient(app)
            try:
                r = local.post("/api/sessions",
                               json={"seeds": ["A"], "direction": "forward"})
                assert r.status_code == 201
                sid = r.json()["session_id"]
                for _ in range(5):
                    assert local.post(
                        f"/api/sessions/{sid}/trace").status_code == 200
                    assert local.get("/api/summary").status_code == 200
                    assert local.get("/api/pagerank?net=hon").status_code == 200
                final = local.get(f"/api/sessions/{sid}").json()
                assert final["step_count"] == 5
            except Exception as exc:  # surfaced after join
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(k,))
                   for k in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
        assert TestClient(app).get("/api/summary").json() == baseline
