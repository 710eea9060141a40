"""Graph-enhanced dialogue state tracking.

Corpora are lists of dialogue dicts in the JSON Lines layout the CLI reads and
writes; states are ``{"domain-slot": value}`` dicts with NULL pairs omitted.
"""

import json

from . import _graphdst
from ._graphdst import CheckpointError, Error, Schema, ValidationError

__all__ = [
    "CheckpointError",
    "Error",
    "Schema",
    "Tracker",
    "ValidationError",
    "apply_derived",
    "derive_operations",
    "generate_corpus",
    "graph_stats",
    "run_cli",
    "state_graph",
]


def _to_jsonl(corpus):
    return "".join(json.dumps(d) + "\n" for d in corpus)


def _from_jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def generate_corpus(schema, n_dialogues, max_turns=6, seed=0):
    return _from_jsonl(_graphdst.generate_corpus_jsonl(schema, n_dialogues, max_turns, seed))


def derive_operations(schema, prev, gold):
    return _graphdst.derive_operations(schema, prev, gold)


def apply_derived(schema, prev, gold):
    """derive_operations followed by apply_operations; returns the new state."""
    return _graphdst.apply_derived(schema, prev, gold)


def state_graph(schema, prev):
    return _graphdst.state_graph(schema, prev)


def graph_stats(schema, corpus):
    return json.loads(_graphdst.graph_stats_json(schema, _to_jsonl(corpus)))


def run_cli(*args):
    """Runs the command-line tool in-process; returns (exit_code, stdout, stderr)."""
    return _graphdst.run_cli([str(a) for a in args])


class Tracker:
    """A trainable tracker. The vocabulary is built from ``corpus``."""

    def __init__(self, schema, corpus, config=None, seed=0, _core=None):
        self.schema = schema
        if _core is None:
            _core = _graphdst.Tracker(
                schema, _to_jsonl(corpus), json.dumps(config) if config else "", seed
            )
        self._core = _core

    @classmethod
    def load(cls, path, schema):
        return cls(schema, None, _core=_graphdst.Tracker.load(str(path), schema))

    def save(self, path):
        self._core.save(str(path))

    @property
    def config(self):
        return json.loads(self._core.config_json())

    @property
    def parameter_count(self):
        return self._core.parameter_count

    def set_graph_enabled(self, enabled):
        self._core.set_graph_enabled(enabled)

    def train(self, train, valid=(), epochs=30, batch_size=8, seed=0, eval_every=0):
        return self._core.train(
            _to_jsonl(train), _to_jsonl(valid), epochs, batch_size, seed, eval_every
        )

    def evaluate(self, corpus, use_predicted_prev=True):
        return self._core.evaluate(_to_jsonl(corpus), use_predicted_prev)

    def track(self, dialogue, use_predicted_prev=True):
        return self._core.track(json.dumps(dialogue), use_predicted_prev)

    def gradcheck(self, batch, samples=20, eps=3e-5):
        return self._core.gradcheck(_to_jsonl(batch), samples, eps)
