"""Episodic environment over the adjacency matrix.

States are one-hot node vectors; actions are next-node indices. The
mask zeroes probabilities of non-neighbors (the zero diagonal forbids
staying put) and renormalizes; a masked sum of zero signals a dead end,
which aborts the episode without a training update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topo import AdjacencyModel


class IllegalStepError(Exception):
    """Attempted to step along a zero adjacency entry."""


@dataclass
class StepOutcome:
    next_state: np.ndarray
    reward: float
    done: bool
    dead_end: bool


def one_hot(n: int, i: int) -> np.ndarray:
    v = np.zeros(n)
    v[i] = 1.0
    return v


class PathEnv:
    """Walks the switch graph from start_node until end_node is reached."""

    def __init__(self, adj: AdjacencyModel):
        self.net = adj.net
        self.num_nodes = adj.num_nodes
        self.start_node = adj.start_node
        self.end_node = adj.end_node
        self.current_node = adj.start_node

    def reset(self) -> np.ndarray:
        self.current_node = self.start_node
        return one_hot(self.num_nodes, self.start_node)

    def current_row(self) -> np.ndarray:
        return self.net[self.current_node]

    def step(self, next_node: int) -> StepOutcome:
        if not 0 <= next_node < self.num_nodes:
            raise IllegalStepError(f"node {next_node} out of range")
        reward = float(self.net[self.current_node, next_node])
        if reward <= 0.0:
            raise IllegalStepError(
                f"no link between node {self.current_node} and node {next_node}"
            )
        self.current_node = next_node
        return StepOutcome(
            next_state=one_hot(self.num_nodes, next_node),
            reward=reward,
            done=next_node == self.end_node,
            dead_end=False,
        )

    def abort_on_dead_end(self) -> None:
        # jump to the end node so the episode loop exits without a fit
        self.current_node = self.end_node


def mask_and_renormalize(probs: np.ndarray, row: np.ndarray):
    """Zero probabilities where row is 0, then renormalize.

    Returns (masked, dead_end). When every connected entry had zero
    mass the dead_end flag is True and the returned vector is
    meaningless (all zeros).
    """
    masked = np.where(np.asarray(row) > 0.0, np.asarray(probs, dtype=np.float64), 0.0)
    total = float(masked.sum())
    if total == 0.0:
        return masked, True
    return masked / total, False


def sample_action(masked: np.ndarray, rng: np.random.Generator) -> int:
    """Categorical draw from a masked, renormalized distribution."""
    return int(rng.choice(masked.shape[0], p=masked))
