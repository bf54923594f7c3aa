"""The scripted end-to-end walkthrough used by the golden-run tests and
the fixture builder: create a project, toggle indexes, regenerate, curate
the cart, select an outcome, accept a risk, generate, export.

Both sides import this module so the requests (and therefore the mock
script keys) cannot drift apart.
"""

SARAH_DESCRIPTION = (
    "The system provides counseling for individuals who are experienced with "
    "substance addiction. A conversational chatbot guides mindful drinking and "
    "recovery goals with personalized support available online at any time."
)

SARAH_PROJECT = {
    "name": "Mindful Drinking",
    "statuses": ["brainstorming", "designing the study"],
    "description": SARAH_DESCRIPTION,
    "initial_plan": "The chatbot will be evaluated based on the intention ratings "
                    "of users after four weeks of use.",
    "initial_outcome": "An accessible, affordable, and personalized online "
                       "counseling chatbot that is available to users.",
}

# the index selection Sarah submits after reviewing the generated ones:
# she checks Addiction Recovery and the Family Members stakeholder
INDEX_EDIT = {
    "paradigms": ["Dyadic"],
    "application_domain": ["Mental Health", "Addiction Recovery"],
    "modality": ["Text-Based"],
    "system_features": ["adaptability"],
    "design_novelty": ["personalized recovery goals"],
    "design_methods": ["User-Centered Design"],
    "human_ai_relationship_types": ["advisor"],
    "stakeholders": ["Primary Users", "Family Members"],
    "social_scale": ["individual"],
    "theoretical_frameworks": ["motivational interviewing"],
}

CART_ADDS = ["trust", "goal achievement", "engagement"]  # alias on purpose
CART_REMOVES = []


def drive(api):
    """Run the full flow against a TestClient-style object; returns the
    session id plus both export payloads."""
    r = api.post("/api/v1/projects", json=SARAH_PROJECT)
    assert r.status_code == 201, r.text
    session = r.json()
    sid = session["id"]

    r = api.put(f"/api/v1/projects/{sid}/indexes", json={"indexes": INDEX_EDIT})
    assert r.status_code == 200, r.text

    r = api.post(f"/api/v1/projects/{sid}/regenerate")
    assert r.status_code == 200, r.text
    diff = r.json()["diff"]

    for metric in CART_ADDS:
        r = api.post(f"/api/v1/projects/{sid}/cart/{metric}")
        assert r.status_code == 200, r.text
    for metric in CART_REMOVES:
        r = api.delete(f"/api/v1/projects/{sid}/cart/{metric}")
        assert r.status_code == 200, r.text

    r = api.get(f"/api/v1/projects/{sid}/outcomes")
    assert r.status_code == 200, r.text
    outcomes = r.json()["outcomes"]
    assert outcomes, "flow expects at least one outcome for the cart"
    r = api.post(f"/api/v1/projects/{sid}/outcomes/select",
                 json={"refs": [outcomes[0]["ref"]]})
    assert r.status_code == 200, r.text

    r = api.get(f"/api/v1/projects/{sid}/risks")
    assert r.status_code == 200, r.text
    risks = r.json()["risks"]
    assert risks, "flow expects at least one risk within the distance gate"
    r = api.post(f"/api/v1/projects/{sid}/risks/accept",
                 json={"refs": [risks[0]["ref"]]})
    assert r.status_code == 200, r.text

    r = api.post(f"/api/v1/projects/{sid}/generate")
    assert r.status_code == 200, r.text

    r = api.get(f"/api/v1/projects/{sid}/export", params={"format": "json"})
    assert r.status_code == 200, r.text
    export_json = r.content
    r = api.get(f"/api/v1/projects/{sid}/export", params={"format": "markdown"})
    assert r.status_code == 200, r.text
    export_md = r.text
    return sid, export_json, export_md, diff


# retrieval case for the tools-side walkthrough: a version-control project
# whose nearest community must offer these four metrics as candidates
VC_DESCRIPTION = (
    "A version control system for software teams that renders branching "
    "history as architectural diagrams and documents design changes "
    "automatically."
)
VC_EXPECTED_METRICS = ["interaction experience", "overall satisfaction",
                       "perceived usability", "task success"]
