"""Structured-text serialization of policies.

All files carry a versioned header line. Floats are written with repr so
they round-trip bit-exactly. Mixture-backed value policies are flattened to a
plain table on save: the stored vectors are exactly the sums the live mixture
would compute, so behaviour is unchanged after a round trip.
"""

from __future__ import annotations

import numpy as np

from .errors import CorruptCheckpoint
from .policies import FixedMixturePolicy, QTable, ValuePolicy

POLICY_HEADER = "psromix-policy v1"


def policy_to_text(policy) -> str:
    lines = [POLICY_HEADER]
    if isinstance(policy, FixedMixturePolicy):
        lines.append("kind mixture")
        lines.append("probs " + " ".join(repr(float(p)) for p in policy.probs))
        return "\n".join(lines) + "\n"
    if isinstance(policy, ValuePolicy):
        table = policy.q
        keys = sorted(table.known_keys())
        lines.append("kind value")
        lines.append(f"epsilon {policy.epsilon!r}")
        lines.append(f"actions {table.action_count}")
        default = getattr(table, "default_value", 0.0)
        lines.append(f"default {float(default)!r}")
        lines.append(f"table {len(keys)}")
        for key in keys:
            values = table.lookup(key)
            lines.append("key " + key.hex() + " " + " ".join(repr(float(v)) for v in values))
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot serialize policy of type {type(policy).__name__}")


def policy_from_text(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != POLICY_HEADER:
        raise CorruptCheckpoint("policy file missing its versioned header")
    kind = lines[1].split()[1]
    if kind == "mixture":
        probs = [float(tok) for tok in lines[2].split()[1:]]
        return FixedMixturePolicy(probs)
    if kind != "value":
        raise CorruptCheckpoint(f"unknown policy kind {kind!r}")
    epsilon = float(lines[2].split()[1])
    actions = int(lines[3].split()[1])
    default = float(lines[4].split()[1])
    n_keys = int(lines[5].split()[1])
    table = QTable(actions, default_value=default)
    for line in lines[6 : 6 + n_keys]:
        tokens = line.split()
        key = bytes.fromhex(tokens[1])
        table.set(key, np.array([float(tok) for tok in tokens[2:]]))
    return ValuePolicy(table, epsilon=epsilon)


def save_policy(policy, path) -> None:
    with open(path, "w") as fh:
        fh.write(policy_to_text(policy))


def load_policy(path):
    try:
        with open(path) as fh:
            return policy_from_text(fh.read())
    except OSError as exc:
        raise CorruptCheckpoint(f"cannot read policy file {path}: {exc}") from exc
