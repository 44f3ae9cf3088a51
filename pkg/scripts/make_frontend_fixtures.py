"""Record real /v1 responses for the browser-client test suite.

Run from the repository root:  python3 scripts/make_frontend_fixtures.py
Ids are rewritten to stable placeholders so the mocked transport can match
request URLs byte-for-byte.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from fastapi.testclient import TestClient

from conftest import build_tools_rcf
from rcanav.io_formats import serialize_rcf_json
from rcanav.service import create_app

FIXTURES = ROOT / "frontend" / "tests" / "fixtures"

WALKTHROUGH_QUERY = ["OS:Windows", "DM:Conceptual", "DM:Logical"]


def collect() -> dict[str, object]:
    document = serialize_rcf_json(build_tools_rcf())
    app = create_app()
    out: dict[str, object] = {"rcf_document": json.loads(document)}
    with TestClient(app) as client:
        loaded = client.post("/v1/rcf", content=document).json()
        rcf_id = loaded["rcf_id"]
        out["rcf_post"] = {**loaded, "rcf_id": "rcf-1"}
        out["contexts"] = client.get(f"/v1/rcf/{rcf_id}/contexts").json()
        created = client.post(
            "/v1/sessions",
            json={
                "rcf_id": rcf_id,
                "context": "DM_tools",
                "strategy": [{"relation": "support", "op": "∃"}],
            },
        ).json()
        session_id = created["session_id"]
        out["session_post"] = {**created, "session_id": "session-1"}
        out["query_walkthrough"] = client.post(
            f"/v1/sessions/{session_id}/query",
            json={"attributes": WALKTHROUGH_QUERY},
        ).json()
        out["step_relational_dbms4"] = client.post(
            f"/v1/sessions/{session_id}/step",
            json={"direction": "relational", "target": "C_DBMS_4"},
        ).json()

        strict = client.post(
            "/v1/sessions",
            json={
                "rcf_id": rcf_id,
                "context": "DM_tools",
                "strategy": [{"relation": "support", "op": "∃∀"}],
            },
        ).json()
        out["session_post_universal"] = {**strict, "session_id": "session-2"}
        out["query_universal_top"] = client.post(
            f"/v1/sessions/{strict['session_id']}/query", json={"attributes": []}
        ).json()
    return out


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name, payload in collect().items():
        path = FIXTURES / f"{name}.json"
        path.write_text(
            json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        print(f"wrote {path.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
