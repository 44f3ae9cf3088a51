import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from rcanav.algebra import Strategy
from rcanav.io_formats import serialize_rcf_json
from rcanav.model import ScalingOperator, UnknownNameError
from rcanav.service import (
    StaleTargetError,
    create_app,
    make_session,
    replay_log,
    run_query,
    run_step,
)

DATA = Path(__file__).parent / "data"
EXISTS = ScalingOperator.EXISTENTIAL
WALKTHROUGH_QUERY = ["OS:Windows", "DM:Conceptual", "DM:Logical"]


# ---------------------------------------------------------------------------
# session layer


def walkthrough_session(rcf):
    return make_session(rcf, "DM_tools", Strategy.of(("support", EXISTS)))


def test_run_query_walkthrough(tools_rcf):
    session = walkthrough_session(tools_rcf)
    payload = run_query(session, WALKTHROUGH_QUERY)
    assert payload["focus"]["extent"] == ["ER/Studio", "Erwin DM", "Magic Draw"]
    assert [c["concept"]["name"] for c in payload["relational"]] == [
        "C_DBMS_2",
        "C_DBMS_3",
        "C_DBMS_4",
    ]
    assert sorted(tuple(c["extent"]) for c in payload["lower"]) == [
        ("ER/Studio", "Erwin DM"),
        ("Magic Draw",),
    ]
    assert len(payload["upper"]) == 2
    assert payload["warning"] is False


def test_run_query_empty_is_top(tools_rcf):
    session = walkthrough_session(tools_rcf)
    payload = run_query(session, [])
    assert payload["focus"]["extent"] == sorted(
        tools_rcf.context("DM_tools").objects
    )
    assert payload["upper"] == []


def test_run_query_single_attr(tools_rcf):
    session = walkthrough_session(tools_rcf)
    payload = run_query(session, ["DM:ETL"])
    assert payload["focus"]["extent"] == ["ER/Studio"]


def test_run_query_unknown_attribute(tools_rcf):
    session = walkthrough_session(tools_rcf)
    with pytest.raises(UnknownNameError):
        run_query(session, ["OS:BeOS"])


def test_empty_extent_query_warns(tools_rcf):
    session = make_session(tools_rcf, "DBMS", Strategy.of())
    payload = run_query(session, ["DT:Set", "DT:Period"])
    assert payload["warning"] is True
    assert payload["focus"]["extent"] == []
    assert payload["lower"] == []


def test_step_relational_switches_context(tools_rcf):
    session = walkthrough_session(tools_rcf)
    run_query(session, WALKTHROUGH_QUERY)
    payload = run_step(session, "relational", "C_DBMS_4")
    assert payload["context"] == "DBMS"
    assert payload["focus"]["extent"] == ["PostgreSQL", "Teradata"]
    assert session.context_id == "DBMS"


def test_step_up_then_down_returns(tools_rcf):
    session = walkthrough_session(tools_rcf)
    first = run_query(session, WALKTHROUGH_QUERY)
    up_name = first["upper"][0]["name"]
    up_payload = run_step(session, "up", up_name)
    down_names = [c["name"] for c in up_payload["lower"]]
    assert first["focus"]["name"] in down_names
    back = run_step(session, "down", first["focus"]["name"])
    assert back["focus"]["extent"] == first["focus"]["extent"]


def test_step_down_cover_sees_focus_above(tools_rcf):
    session = walkthrough_session(tools_rcf)
    first = run_query(session, WALKTHROUGH_QUERY)
    magic_draw = next(
        c["name"] for c in first["lower"] if c["extent"] == ["Magic Draw"]
    )
    payload = run_step(session, "down", magic_draw)
    assert first["focus"]["extent"] in [c["extent"] for c in payload["upper"]]


def test_step_stale_target(tools_rcf):
    session = walkthrough_session(tools_rcf)
    run_query(session, WALKTHROUGH_QUERY)
    with pytest.raises(StaleTargetError):
        run_step(session, "up", "C_DM_tools_99")
    with pytest.raises(StaleTargetError):
        run_step(session, "relational", "C_DBMS_1")


def test_step_before_query(tools_rcf):
    session = walkthrough_session(tools_rcf)
    with pytest.raises(StaleTargetError):
        run_step(session, "up", "C_DM_tools_1")


def test_sessions_are_isolated(tools_rcf):
    one = walkthrough_session(tools_rcf)
    two = walkthrough_session(tools_rcf)
    run_query(one, WALKTHROUGH_QUERY)
    assert len(one.rcf.context("DM_tools").attributes) == 11
    assert len(two.rcf.context("DM_tools").attributes) == 7
    assert len(tools_rcf.context("DM_tools").attributes) == 7


def test_snapshot_monotonicity(tools_rcf):
    session = walkthrough_session(tools_rcf)
    counts = [len(session.rcf.context("DM_tools").attributes)]
    run_query(session, WALKTHROUGH_QUERY)
    counts.append(len(session.rcf.context("DM_tools").attributes))
    run_step(session, "relational", "C_DBMS_4")
    counts.append(len(session.rcf.context("DM_tools").attributes))
    assert counts == sorted(counts)


def test_replay_reproduces_byte_identical_payloads(tools_rcf):
    session = walkthrough_session(tools_rcf)
    payloads = [
        run_query(session, WALKTHROUGH_QUERY),
        run_step(session, "down", "C_DM_tools_4"),
        run_step(session, "up", "C_DM_tools_1"),
        run_step(session, "relational", "C_DBMS_4"),
    ]
    replayed = replay_log(tools_rcf, "DM_tools", session.strategy, session.log)
    originals = [json.dumps(p, ensure_ascii=False, sort_keys=True) for p in payloads]
    copies = [json.dumps(p, ensure_ascii=False, sort_keys=True) for p in replayed]
    assert originals == copies


# ---------------------------------------------------------------------------
# HTTP layer


@pytest.fixture
def client(tools_rcf):
    app = create_app()
    with TestClient(app) as client:
        client.rcf_id = client.post(
            "/v1/rcf", content=serialize_rcf_json(tools_rcf)
        ).json()["rcf_id"]
        yield client


def make_http_session(client, strategy=({"relation": "support", "op": "∃"},)):
    response = client.post(
        "/v1/sessions",
        json={
            "rcf_id": client.rcf_id,
            "context": "DM_tools",
            "strategy": list(strategy),
        },
    )
    assert response.status_code == 200, response.text
    return response.json()["session_id"]


def test_http_load_and_list(client):
    response = client.get(f"/v1/rcf/{client.rcf_id}/contexts")
    assert response.status_code == 200
    body = response.json()
    assert [c["id"] for c in body["contexts"]] == ["DBMS", "DM_tools"]
    tools = next(c for c in body["contexts"] if c["id"] == "DM_tools")
    assert len(tools["attributes"]) == 7
    assert body["relations"] == [
        {"name": "support", "source": "DM_tools", "target": "DBMS"}
    ]


def test_http_rejects_bad_document(client):
    response = client.post("/v1/rcf", content='{"format": "rcf/2", "contexts": []}')
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "bad-version"


def test_http_query_walkthrough(client):
    session_id = make_http_session(client)
    response = client.post(
        f"/v1/sessions/{session_id}/query",
        json={"attributes": WALKTHROUGH_QUERY},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["focus"]["extent"] == ["ER/Studio", "Erwin DM", "Magic Draw"]
    assert len(body["upper"]) == 2
    assert len(body["lower"]) == 2
    assert len(body["relational"]) == 3


def test_http_step_and_log(client):
    session_id = make_http_session(client)
    client.post(
        f"/v1/sessions/{session_id}/query", json={"attributes": WALKTHROUGH_QUERY}
    )
    response = client.post(
        f"/v1/sessions/{session_id}/step",
        json={"direction": "relational", "target": "C_DBMS_4"},
    )
    assert response.status_code == 200
    assert response.json()["context"] == "DBMS"
    assert response.json()["focus"]["extent"] == ["PostgreSQL", "Teradata"]

    log = client.get(f"/v1/sessions/{session_id}/log").json()
    assert [e["action"] for e in log["entries"]] == ["query", "step"]
    assert log["entries"][1]["context"] == "DBMS"
    assert log["strategy"] == [{"relation": "support", "op": "∃"}]


def test_http_ascii_operator_alias(client):
    session_id = make_http_session(
        client, ({"relation": "support", "op": "exists"},)
    )
    response = client.post(
        f"/v1/sessions/{session_id}/query", json={"attributes": []}
    )
    assert response.status_code == 200


def test_http_stale_target_conflict(client):
    session_id = make_http_session(client)
    client.post(
        f"/v1/sessions/{session_id}/query", json={"attributes": WALKTHROUGH_QUERY}
    )
    response = client.post(
        f"/v1/sessions/{session_id}/step",
        json={"direction": "up", "target": "C_DM_tools_99"},
    )
    assert response.status_code == 409
    assert response.json()["error"]["code"] == "stale-target"


def test_http_unknown_attribute(client):
    session_id = make_http_session(client)
    response = client.post(
        f"/v1/sessions/{session_id}/query", json={"attributes": ["OS:BeOS"]}
    )
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "unknown-name"


def test_http_unknown_session(client):
    response = client.post(
        "/v1/sessions/nope/query", json={"attributes": []}
    )
    assert response.status_code == 404
    assert response.json()["error"]["code"] == "not-found"


def test_http_session_with_wrong_source_relation(client):
    response = client.post(
        "/v1/sessions",
        json={
            "rcf_id": client.rcf_id,
            "context": "DM_tools",
            "strategy": [{"relation": "uses", "op": "∃"}],
        },
    )
    assert response.status_code == 400


def test_http_unknown_rcf(client):
    response = client.post(
        "/v1/sessions",
        json={"rcf_id": "missing", "context": "DM_tools", "strategy": []},
    )
    assert response.status_code == 404


def test_frontend_fixtures_match_live_service():
    # the browser client's recorded payloads must stay in sync with the
    # service; regenerate with scripts/make_frontend_fixtures.py when the
    # wire format changes
    import importlib.util

    root = Path(__file__).parent.parent
    fixtures = root / "frontend" / "tests" / "fixtures"
    if not fixtures.is_dir():
        pytest.skip("frontend fixtures not present")
    spec = importlib.util.spec_from_file_location(
        "make_frontend_fixtures", root / "scripts" / "make_frontend_fixtures.py"
    )
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    for name, payload in module.collect().items():
        recorded = json.loads((fixtures / f"{name}.json").read_text("utf-8"))
        assert recorded == payload, f"stale fixture {name}.json"


def test_http_degraded_snapshot_conflict():
    # a self-loop walked across several growth generations can outgrow the
    # step-wise attribute representation; the service reports a conflict
    # instead of wedging
    doc = {
        "format": "rcf/1",
        "contexts": [
            {
                "id": "K0",
                "objects": ["K0_o0", "K0_o1", "K0_o2", "K0_o3", "K0_o4"],
                "attributes": ["K0_a0", "K0_a1"],
                "incidence": [
                    ["K0_o0", "K0_a0"],
                    ["K0_o3", "K0_a0"],
                    ["K0_o4", "K0_a1"],
                ],
            }
        ],
        "relations": [
            {
                "name": "r0",
                "source": "K0",
                "target": "K0",
                "pairs": [
                    ["K0_o0", "K0_o0"],
                    ["K0_o0", "K0_o3"],
                    ["K0_o0", "K0_o4"],
                    ["K0_o1", "K0_o0"],
                    ["K0_o1", "K0_o4"],
                    ["K0_o2", "K0_o2"],
                    ["K0_o2", "K0_o3"],
                    ["K0_o2", "K0_o4"],
                    ["K0_o3", "K0_o1"],
                    ["K0_o4", "K0_o1"],
                ],
            }
        ],
    }
    app = create_app()
    with TestClient(app) as client:
        rcf_id = client.post("/v1/rcf", content=json.dumps(doc)).json()["rcf_id"]
        session_id = client.post(
            "/v1/sessions",
            json={
                "rcf_id": rcf_id,
                "context": "K0",
                "strategy": [{"relation": "r0", "op": "∃"}],
            },
        ).json()["session_id"]
        client.post(f"/v1/sessions/{session_id}/query", json={"attributes": []})
        first = client.post(
            f"/v1/sessions/{session_id}/step",
            json={"direction": "down", "target": "C_K0_4"},
        )
        assert first.status_code == 200
        second = client.post(
            f"/v1/sessions/{session_id}/step",
            json={"direction": "up", "target": "C_K0_3"},
        )
        assert second.status_code == 409
        assert second.json()["error"]["code"] == "snapshot-degraded"
