"""Python interface to the GenRAVEN C++ core.

Samples travel as int8 arrays of shape (N, 3, 9, 9) indexed
[sample, channel, panel, slot]; channels are shape, size, color and an empty
slot is -1 on every channel. Rule labels are names such as "CONST-SHAPE".
"""

import json

from . import _core
from ._core import (
    Error,
    FormatError,
    GenerationFailure,
    applicable_rules,
    complete,
    default_held_out,
    inventory_digest,
    read_dataset,
    rule_inventory,
    shared_rules,
    write_dataset,
)

__all__ = [
    "Error",
    "FormatError",
    "GenerationFailure",
    "applicable_rules",
    "complete",
    "completion_report",
    "consistency_report",
    "default_held_out",
    "generate",
    "inventory_digest",
    "memorization_report",
    "read_dataset",
    "rule_inventory",
    "shared_rules",
    "write_dataset",
]


def generate(seed, n_per_rule, split="train", rules=None, held_out=None, workers=0):
    """Returns (grids, labels, manifest). held_out=None keeps the default five."""
    grids, labels, manifest = _core.generate(seed, n_per_rule, split, rules, held_out, workers)
    return grids, labels, json.loads(manifest)


def consistency_report(grids, workers=0):
    return json.loads(_core.consistency_report(grids, workers))


def completion_report(tests, labels, completions, held_out=None):
    return json.loads(_core.completion_report(tests, labels, completions, held_out))


def memorization_report(generated, train, control=None, workers=0):
    return json.loads(_core.memorization_report(generated, train, control, workers))
