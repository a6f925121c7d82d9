"""Smoke tests for the designctl python extension and the CLI JSON contract.

Run via ctest (PYTHONPATH points at the build tree) or against an
installed wheel. DESIGNCTL_FIXTURES / DESIGNCTL_SCHEMAS / DESIGNCTL_BIN
come from the test environment.
"""

import json
import os
import subprocess

import pytest

designctl = pytest.importorskip("designctl")

FIXTURES = os.environ.get("DESIGNCTL_FIXTURES", "tests/fixtures")
SCHEMAS = os.environ.get("DESIGNCTL_SCHEMAS", "docs/schema")
BIN = os.environ.get("DESIGNCTL_BIN")


def fixture(path):
    return os.path.join(FIXTURES, path)


def read(path):
    with open(path, "rb") as f:
        return f.read()


@pytest.fixture(scope="module")
def release_card():
    return designctl.parse_card(read(fixture("cards/valid_release_full.json")).decode())


def test_digest_of_empty_input():
    assert (
        designctl.digest_artifact(b"", "model")
        == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    )


def test_parse_and_validate(release_card):
    assert release_card.name == "arthro-risk"
    report = designctl.validate(release_card, "release")
    assert report["passed"] is True
    assert report["profile"] == "release"


def test_validate_flags_missing_quantitative_analysis():
    card = designctl.parse_card(read(fixture("cards/invalid_qa_missing.json")).decode())
    report = designctl.validate(card, "release")
    assert report["passed"] is False
    assert [f["code"] for f in report["findings"]] == ["QA_MISSING"]


def test_diff_and_redact(release_card):
    redacted = designctl.redact_card(release_card)
    assert "partner hospital joint registry" not in redacted.serialize()
    d = designctl.diff(release_card, redacted)
    assert d["datasets_changed"] is True
    assert d["version_changed"] is False


def test_trace_graph_and_gate():
    graph = designctl.load_graph(fixture("trace"))
    assert graph.size == 16
    assert designctl.completeness(graph) == []
    config = {
        "required_roles": ["developer", "data_scientist", "regulatory", "clinical"]
    }
    ctx = designctl.load_pr_context(fixture("pr/pr_pass.json"), json.dumps(config))
    assert ctx.model_artifact_changed is True
    verdict = designctl.gate(ctx, graph, config)
    assert verdict["status"] == "pass"
    assert len(verdict["rule_results"]) == 7


def test_gate_catches_locked_violation():
    graph = designctl.load_graph(fixture("trace"))
    config = {
        "required_roles": ["developer", "data_scientist", "regulatory", "clinical"]
    }
    ctx = designctl.load_pr_context(fixture("pr/pr_locked_fail.json"), json.dumps(config))
    verdict = designctl.gate(ctx, graph, config)
    assert verdict["status"] == "fail"
    r7 = next(r for r in verdict["rule_results"] if r["rule_id"] == "R7")
    assert r7["outcome"] == "fail"


def test_explain_rule_mentions_the_anchor():
    assert "independent of test sets" in designctl.explain_rule("R3")
    with pytest.raises(designctl.Error):
        designctl.explain_rule("R99")


def test_dataset_overlap():
    count, sample = designctl.dataset_overlap(["a" * 64, "b" * 64], ["b" * 64, "c" * 64])
    assert count == 1
    assert sample == ["b" * 64]


def test_monitor_stream(release_card):
    events = read(fixture("events/drop.jsonl")).decode()
    result = designctl.monitor(events, release_card, window=4)
    assert [d["kind"] for d in result["deviations"]] == ["accuracy_drop"]
    assert len(result["feedback"]) == 1


def test_render_model_card_public(release_card):
    rendered = designctl.render_model_card(release_card, "public")
    assert rendered.startswith("# Model Card: arthro-risk")
    assert "partner hospital joint registry" not in rendered


def test_provenance_chain():
    chain = designctl.chain(
        fixture("repo/provenance.jsonl"),
        designctl.digest_artifact(read(fixture("repo/modelcard.json")), "card"),
    )
    assert [r["kind"] for r in chain] == [
        "data_source",
        "dataset",
        "dataset",
        "model",
        "card",
    ]


# ----------------------------------------------------------- CLI + schemas

jsonschema = pytest.importorskip("jsonschema")


def load_schema(name):
    with open(os.path.join(SCHEMAS, name)) as f:
        return json.load(f)


def run_cli(*args):
    assert BIN, "DESIGNCTL_BIN not set"
    proc = subprocess.run([BIN, *args], capture_output=True, text=True)
    return proc.returncode, proc.stdout


def check_against(name, payload):
    schema = load_schema(name)
    resolver = jsonschema.RefResolver(
        base_uri="file://" + os.path.abspath(SCHEMAS) + "/", referrer=schema
    )
    jsonschema.validate(payload, schema, resolver=resolver)


@pytest.mark.skipif(BIN is None, reason="DESIGNCTL_BIN not set")
class TestCliOutputsValidateAgainstSchemas:
    def test_validate_output(self):
        code, out = run_cli("validate", fixture("cards/valid_release_full.json"))
        assert code == 0
        check_against("validation_report.schema.json", json.loads(out))

    def test_trace_check_output(self):
        code, out = run_cli("trace", "check", "--dir", fixture("trace"))
        assert code == 0
        check_against("trace_check_output.schema.json", json.loads(out))

    def test_gate_output(self):
        code, out = run_cli(
            "gate", fixture("pr/pr_pass.json"), "--trace-dir", fixture("trace")
        )
        assert code == 0
        check_against("gate_verdict.schema.json", json.loads(out))

    def test_monitor_output(self):
        code, out = run_cli(
            "monitor",
            fixture("events/drop.jsonl"),
            "--card",
            fixture("cards/valid_release_full.json"),
            "--window",
            "4",
        )
        assert code == 0
        check_against("monitor_output.schema.json", json.loads(out))

    def test_locked_output(self):
        code, out = run_cli(
            "provenance", "locked", "f" * 64, "--registry", fixture("repo/registry.json")
        )
        assert code == 1
        check_against("locked_check.schema.json", json.loads(out))

    def test_verify_output(self):
        code, out = run_cli(
            "provenance", "verify", "9" * 64, "--store", fixture("repo/provenance.jsonl")
        )
        assert code == 1
        check_against("verify_output.schema.json", json.loads(out))

    def test_redact_output_is_a_valid_card(self):
        code, out = run_cli("redact", fixture("cards/valid_release_full.json"))
        assert code == 0
        check_against("modelcard.schema.json", json.loads(out))

    def test_explain_output(self):
        code, out = run_cli("explain", "R5")
        assert code == 0
        check_against("explain_output.schema.json", json.loads(out))

    def test_report_manifest(self, tmp_path):
        code, out = run_cli(
            "report",
            fixture("repo/modelcard.json"),
            "--trace-dir",
            fixture("repo/trace"),
            "--out",
            str(tmp_path),
        )
        assert code == 0
        check_against("report_manifest.schema.json", json.loads(out))

    def test_fixture_snapshots_validate(self):
        for name in ("pr_pass.json", "pr_locked_fail.json", "pr_overlap.json"):
            with open(fixture(f"pr/{name}")) as f:
                check_against("pr_snapshot.schema.json", json.load(f))

    def test_fixture_cards_validate(self):
        with open(fixture("cards/expected.json")) as f:
            names = json.load(f)
        for name in names:
            with open(fixture(f"cards/{name}")) as f:
                check_against("modelcard.schema.json", json.load(f))
