"""Contract test: every REST response body validates against schemas/."""

import json
import os
import pathlib
import subprocess
import tempfile
import time

import pytest
import requests
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

SCHEMAS = pathlib.Path(os.environ.get("DELTA_SCHEMAS", pathlib.Path(__file__).parents[2] / "schemas"))
CLI = os.environ["DELTA_CLI"]

RAYQUAZALIZE = """increment {{role}} {
  fn move_3() {
    rayquazalize()
  }

  fn rayquazalize() {
    type_change("Dragon", "Flying")
    self.flags.protected = 1
  }
}
"""

GREEN_BUG = {
    "species": "Green-Bug",
    "types": ["Bug"],
    "stats": {"hp": 45, "atk": 50, "def": 45, "spa": 30, "spd": 40, "spe": 55},
    "moves": [
        {"name": "Tackle", "description": "A full-body charge.", "basePower": 40, "category": "physical",
         "type": "Normal"},
        {"name": "Lundge", "description": "Lunges at the foe.", "basePower": 40, "category": "physical",
         "type": "Bug"},
    ],
}


def _registry():
    resources = []
    for f in SCHEMAS.glob("*.schema.json"):
        doc = json.loads(f.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(resources)


REGISTRY = _registry()


def validator(name):
    doc = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    Draft202012Validator.check_schema(doc)
    return Draft202012Validator(doc, registry=REGISTRY)


def check(name, body):
    errors = sorted(validator(name).iter_errors(body), key=str)
    assert not errors, f"{name}: " + "; ".join(e.message for e in errors[:5])


def start(data_dir, config):
    proc = subprocess.Popen(
        [CLI, "serve", "--listen", "127.0.0.1:0", "--data", str(data_dir), "--config", str(config)],
        stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, text=True)
    line = proc.stdout.readline()
    assert line.startswith("listening on "), line
    return proc, "http://" + line.split()[-1]


@pytest.fixture(scope="module")
def server():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = pathlib.Path(tmp) / "cfg.json"
        cfg.write_text(json.dumps({
            "proxy_kind": "scripted",
            "interactive_timeout_seconds": 0.5,
            "scripted_proxy": {
                "rules": [
                    {"pattern": "Learn the move Rayquazalize*", "select": ["type_change"], "delta": RAYQUAZALIZE},
                    {"pattern": "garbage*", "select": ["type_change"], "delta": "no increment here"},
                ],
                "fallback": "grow",
            },
        }))
        proc, base = start(pathlib.Path(tmp) / "data", cfg)
        try:
            yield base
        finally:
            proc.terminate()
            proc.wait(timeout=10)


def test_request_example_matches_script_schema():
    check("role_script", GREEN_BUG)


def test_health(server):
    r = requests.get(server + "/api/health")
    assert r.status_code == 200
    check("health", r.json())


def test_roles(server):
    r = requests.post(server + "/api/roles", json=GREEN_BUG)
    assert r.status_code == 201
    check("role", r.json())
    role_id = r.json()["roleId"]
    assert "fn move_1()" in r.json()["code"] and "fn move_2()" in r.json()["code"]

    r = requests.post(server + "/api/roles", json={k: v for k, v in GREEN_BUG.items() if k != "stats"})
    assert r.status_code == 400
    check("error", r.json())

    r = requests.post(server + f"/api/roles/{role_id}/evolve",
                      json={"instruction": "Learn the move Rayquazalize: a sky dragon."})
    assert r.status_code == 200
    check("evolve_response", r.json())
    assert r.json()["delta"].count("fn ") == 2

    for instruction in ["Learn the move Gust: wind.", "Gain the ability Shed: molts."]:
        r = requests.post(server + f"/api/roles/{role_id}/evolve", json={"instruction": instruction})
        assert r.status_code == 200
        check("evolve_response", r.json())

    r = requests.post(server + f"/api/roles/{role_id}/evolve", json={"instruction": "garbage please"})
    assert r.status_code == 422
    check("error", r.json())
    assert "no increment here" in r.json()["rawResponse"]

    r = requests.get(server + f"/api/roles/{role_id}")
    assert r.status_code == 200
    check("role", r.json())
    assert len(r.json()["history"]) == 3

    r = requests.get(server + "/api/roles")
    check("role_list", r.json())

    for path in ["/api/roles/nope", "/api/battles/nope"]:
        r = requests.get(server + path)
        assert r.status_code == 404
        check("error", r.json())
    r = requests.post(server + "/api/roles/nope/evolve", json={"instruction": "x"})
    assert r.status_code == 404
    check("error", r.json())


def test_battles(server):
    role_id = requests.post(server + "/api/roles", json=GREEN_BUG).json()["roleId"]
    r = requests.post(server + "/api/battles", json={"roleA": role_id, "opponentSeed": 3, "seed": 5,
                                                     "policyB": [1, 2]})
    assert r.status_code == 202
    check("battle", r.json())
    battle_id = r.json()["battleId"]

    with requests.get(server + f"/api/battles/{battle_id}/log", params={"follow": 1}, stream=True) as log:
        assert log.status_code == 200
        lines = [json.loads(l) for l in log.iter_lines() if l]
    assert lines
    for event in lines:
        check("battle_event", event)

    status = requests.get(server + f"/api/battles/{battle_id}").json()
    check("battle", status)
    assert status["status"] == "finished"
    assert status["eventCount"] == len(lines)
    assert status["turn"] <= 100

    r = requests.post(server + "/api/battles", json={"roleA": role_id, "roleB": role_id,
                                                     "policyA": "interactive", "maxTurns": 2})
    battle_id = r.json()["battleId"]
    r = requests.post(server + f"/api/battles/{battle_id}/actions", json={"side": "A", "move": 2})
    assert r.status_code == 202
    check("action_response", r.json())
    r = requests.post(server + f"/api/battles/{battle_id}/actions", json={"side": "B", "move": 1})
    assert r.status_code == 409
    check("error", r.json())

    deadline = time.time() + 10
    while requests.get(server + f"/api/battles/{battle_id}").json()["status"] != "finished":
        assert time.time() < deadline
        time.sleep(0.05)
    status = requests.get(server + f"/api/battles/{battle_id}").json()
    check("battle", status)

    r = requests.post(server + "/api/battles", json={"roleA": role_id, "policyA": "greedy"})
    assert r.status_code == 400
    check("error", r.json())
