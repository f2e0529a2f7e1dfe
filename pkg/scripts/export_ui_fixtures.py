"""Record real service responses as JSON fixtures for the frontend tests."""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from bagsim.fixtures import enterprise_text
from bagsim.service import create_app

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    client = TestClient(create_app())
    doc = json.loads(enterprise_text())
    doc["name"] = "enterprise"
    gid = client.post("/graphs", json=doc).json()["graph_id"]
    sid = client.post("/sessions", json={"graph_id": gid}).json()["session_id"]

    (OUT / "catalog.json").write_text(json.dumps(client.get("/graphs").json(), indent=2))
    (OUT / "graph_detail.json").write_text(
        json.dumps(client.get(f"/graphs/{gid}").json(), indent=2)
    )

    empty = client.post(f"/sessions/{sid}/infer", json={"technique": "exact"}).json()
    (OUT / "infer_exact_empty.json").write_text(json.dumps(empty, indent=2))

    client.patch(f"/sessions/{sid}/evidence", json={"set": {"17": False}})
    off17 = client.post(f"/sessions/{sid}/infer", json={"technique": "exact"}).json()
    (OUT / "infer_exact_17n.json").write_text(json.dumps(off17, indent=2))

    client.patch(f"/sessions/{sid}/evidence", json={"clear_all": True})
    client.patch(f"/sessions/{sid}/evidence", json={"set": {"6": True}})
    lw = client.post(
        f"/sessions/{sid}/infer", json={"technique": "lw", "seed": 7, "error": 0.02}
    ).json()
    (OUT / "infer_lw_6y.json").write_text(json.dumps(lw, indent=2))

    sens = client.get(f"/graphs/{gid}/sensitivity", params={"goal": 1, "engine": "exact"}).json()
    (OUT / "sensitivity_exact.json").write_text(json.dumps(sens, indent=2))
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
