"""Drive the HTTP API end to end in-process: create a project, edit
indexes, regenerate, fill the cart, pick outcomes and risks, generate the
plan, export. The same flow works against `uxrec serve` over the network.

    python3 demos/04_service_walkthrough.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from uxrec.service import create_app, load_components, load_config

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

tmp = tempfile.mkdtemp(prefix="uxrec-demo-")
config = load_config(FIXTURES / "service_config.json",
                     environ={"UXREC_SESSIONS_DIR": json.dumps(tmp)})
app = create_app(load_components(config))
api = TestClient(app)

project = {
    "name": "Mindful Drinking",
    "statuses": ["brainstorming", "designing the study"],
    "description": (
        "The system provides counseling for individuals who are experienced with "
        "substance addiction. A conversational chatbot guides mindful drinking and "
        "recovery goals with personalized support available online at any time."),
    "initial_plan": "The chatbot will be evaluated based on the intention ratings "
                    "of users after four weeks of use.",
    "initial_outcome": "An accessible, affordable, and personalized online "
                       "counseling chatbot that is available to users.",
}

session = api.post("/api/v1/projects", json=project).json()
sid = session["id"]
print(f"created session {sid} at revision {session['revision']}")
print(f"generated application_domain: "
      f"{session['current_indexes']['application_domain']}")
print(f"first recommendation: "
      f"{[m['name'] for m in session['current_recommendation']['metrics']]}")

edited = dict(session["current_indexes"])
edited["application_domain"] = ["Mental Health", "Addiction Recovery"]
edited["stakeholders"] = ["Primary Users", "Family Members"]
api.put(f"/api/v1/projects/{sid}/indexes", json={"indexes": edited})
regen = api.post(f"/api/v1/projects/{sid}/regenerate").json()
print(f"\nafter index edit the diff is: {regen['diff']}")

for metric in ("trust", "goal achievement", "engagement"):  # alias resolves
    api.post(f"/api/v1/projects/{sid}/cart/{metric}")
print(f"cart: {api.get(f'/api/v1/projects/{sid}/metrics').json()['cart']}")

outcomes = api.get(f"/api/v1/projects/{sid}/outcomes").json()["outcomes"]
api.post(f"/api/v1/projects/{sid}/outcomes/select",
         json={"refs": [outcomes[0]["ref"]]})
print(f"outcomes available: {len(outcomes)}; selected the first")

risks = api.get(f"/api/v1/projects/{sid}/risks").json()["risks"]
api.post(f"/api/v1/projects/{sid}/risks/accept", json={"refs": [risks[0]["ref"]]})
print(f"risks within the gate: {len(risks)}; accepted: {risks[0]['risk'][:60]}...")

generated = api.post(f"/api/v1/projects/{sid}/generate").json()
print(f"\nplan:\n{generated['plan']}")

export = api.get(f"/api/v1/projects/{sid}/export", params={"format": "json"})
doc = json.loads(export.content)
print(f"\nexport carries {len(doc['selected_metrics'])} metrics, "
      f"{len(doc['risks'])} risks, {len(doc['diff_history'])} diffs "
      f"({len(export.content)} bytes, deterministic)")
