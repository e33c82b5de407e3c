"""Proof-trace serialization, determinism, and independent re-checking."""

import json

import pytest

from dpn.cases import ProofTrace, TraceSchemaError
from dpn.eliminator import prove_theorem_2
from dpn.trace import TraceCheckError, check_trace


def find_node(obj, predicate, path=()):
    """First node dict (depth-first) in a trace object satisfying predicate."""
    if predicate(obj):
        return obj, path
    for i, child in enumerate(obj.get("children", [])):
        got = find_node(child, predicate, path + (i,))
        if got is not None:
            return got
    return None


class TestSerialization:
    def test_round_trip(self, theorem1_trace):
        text = theorem1_trace.to_json()
        again = ProofTrace.from_json(text)
        assert again.to_json() == text

    def test_deterministic(self, theorem2_trace):
        assert prove_theorem_2().to_json() == theorem2_trace.to_json()

    def test_schema_rejects_garbage(self):
        with pytest.raises(TraceSchemaError):
            ProofTrace.from_json("")
        with pytest.raises(TraceSchemaError):
            ProofTrace.from_json("[1, 2]")
        with pytest.raises(TraceSchemaError):
            ProofTrace.from_json('{"schema_version": 999, "kind": "proof-trace"}')
        with pytest.raises(TraceSchemaError):
            ProofTrace.from_json('{"schema_version": 1, "kind": "something-else"}')


class TestChecker:
    def test_checks_clean_traces(self, theorem1_trace, theorem2_trace):
        assert check_trace(theorem1_trace) == theorem1_trace.meta["nodes"]
        assert check_trace(theorem2_trace) == theorem2_trace.meta["nodes"]

    def _tampered(self, trace, mutate, predicate):
        obj = json.loads(trace.to_json())
        node, path = find_node(obj["root"], predicate)
        mutate(node)
        return ProofTrace.from_obj({**obj, "root": obj["root"]})

    def test_detects_perturbed_interval_value(self, theorem1_trace):
        def is_interval(n):
            w = n.get("witnesses", {}).get("final", {})
            return w.get("kind") == "interval" and n.get("verdict") == "eliminated"

        def bump(node):
            num, den = node["witnesses"]["final"]["value"].split("/")
            node["witnesses"]["final"]["value"] = f"{int(num) + 1}/{den}"

        bad = self._tampered(theorem1_trace, bump, is_interval)
        with pytest.raises(TraceCheckError):
            check_trace(bad)

    def test_detects_perturbed_order_table(self, theorem1_trace):
        def is_orders(n):
            w = n.get("witnesses", {}).get("final", {})
            return w.get("kind") == "order-parity" and "orders" in w

        def bump(node):
            node["witnesses"]["final"]["orders"][0][1] += 2

        bad = self._tampered(theorem1_trace, bump, is_orders)
        with pytest.raises(TraceCheckError):
            check_trace(bad)

    def test_detects_dropped_branch_child(self, theorem1_trace):
        def is_prime_branch(n):
            b = n.get("witnesses", {}).get("branch", {})
            return b.get("kind") == "prime-slot" and len(n.get("children", [])) > 2

        def drop(node):
            del node["children"][-1]

        bad = self._tampered(theorem1_trace, drop, is_prime_branch)
        with pytest.raises(TraceCheckError):
            check_trace(bad)

    def test_detects_flipped_verdict(self, theorem1_trace):
        def is_eliminated_leaf(n):
            return n.get("verdict") == "eliminated" and not n.get("children")

        def flip(node):
            node["witnesses"] = {}

        bad = self._tampered(theorem1_trace, flip, is_eliminated_leaf)
        with pytest.raises(TraceCheckError):
            check_trace(bad)

    def test_error_names_failing_step(self, theorem1_trace):
        def is_interval(n):
            w = n.get("witnesses", {}).get("final", {})
            return w.get("kind") == "interval" and n.get("verdict") == "eliminated"

        def bump(node):
            num, den = node["witnesses"]["final"]["value"].split("/")
            node["witnesses"]["final"]["value"] = f"{int(num) + 1}/{den}"

        bad = self._tampered(theorem1_trace, bump, is_interval)
        with pytest.raises(TraceCheckError) as e:
            check_trace(bad)
        assert "root" in str(e.value)  # the failure is located by path
