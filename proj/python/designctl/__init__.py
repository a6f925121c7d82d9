"""designctl: continuous design control toolkit for ML in certified medical systems.

The heavy lifting lives in the C++ extension ``designctl._core``; composite
values cross the boundary as canonical JSON. The helpers here return plain
dicts/lists so scripts don't have to juggle JSON strings.
"""

import json as _json

from ._core import (  # noqa: F401
    Error,
    ModelCard,
    PullRequestContext,
    TraceGraph,
    __version__,
    build_graph,
    check_locked,
    dataset_overlap,
    digest_artifact,
    evaluate_gate,
    explain_rule,
    impact,
    load_graph,
    load_pr_context,
    monitor_stream,
    parse_card,
    redact_card,
    render_clinical_validation_report,
    render_model_card,
    render_risk_report,
    render_trace_matrix,
    verify_chain,
)
from . import _core


def validate(card, profile="release"):
    """Validate a ModelCard; returns the validation report as a dict."""
    return _json.loads(_core.validate_card(card, profile))


def diff(old_card, new_card):
    """Field-level diff of two ModelCards as a dict."""
    return _json.loads(_core.diff_cards(old_card, new_card))


def completeness(graph):
    """Completeness findings of a TraceGraph as a list of dicts."""
    return _json.loads(_core.check_completeness(graph))


def decomposition(graph):
    """Decomposition findings of a TraceGraph as a list of dicts."""
    return _json.loads(_core.check_decomposition(graph))


def matrix(graph):
    """Traceability matrix rows as a list of dicts."""
    return _json.loads(_core.trace_matrix(graph))


def gate(ctx, graph, config=None):
    """Evaluate the design-control gate; returns the verdict as a dict."""
    config_json = _json.dumps(config) if config else ""
    return _json.loads(_core.evaluate_gate(ctx, graph, config_json))


def monitor(events_jsonl, card, **drift):
    """Detect deviations in a prediction stream; returns dict with
    'deviations' and 'feedback'."""
    return _json.loads(_core.monitor_stream(events_jsonl, card, **drift))


def chain(store_path, digest):
    """Verified provenance chain of a digest as a list of dicts."""
    return _json.loads(_core.verify_chain(store_path, digest))
