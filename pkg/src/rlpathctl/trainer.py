"""Episode loop: predict, log, mask, sample, reward, single fit step.

Each loop iteration logs the model's predicted distribution for the
one-hot start-node input (one TraceLog row per iteration), then either
aborts on a dead end (no fit) or samples a move and fits once on the
(state, scaled one-hot target) pair.

Reproducibility: one seeded generator drives both weight init and
action sampling. Draw order is documented and fixed: the three weight
matrices first (when the model is created on the shared generator),
then one categorical draw per training step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import policynet
from .policynet import PolicyNet, forward, make_target, train_step
from .rlenv import PathEnv, mask_and_renormalize, one_hot, sample_action

CONVERGENCE_THRESHOLD = 0.9
CONVERGENCE_PERSISTENCE = 10  # consecutive logged rows


class TrainingError(Exception):
    """Training aborted; `net` carries the model for a diagnostic checkpoint."""

    def __init__(self, message: str, net: PolicyNet | None = None, episode: int | None = None):
        super().__init__(message)
        self.net = net
        self.episode = episode


@dataclass
class TrainConfig:
    num_episodes: int = 1000
    learning_rate: float = 0.01
    seed: int = 0
    step_cap: int | None = None  # defaults to 50 * num_nodes
    log_path: Path | None = None


@dataclass
class TraceRow:
    episode: int
    step: int
    probs: np.ndarray


class TraceLog:
    """Per-step records of predicted start-node action probabilities.

    Rows are kept in memory; when a CSV path is attached, each row is
    also written through immediately (an I/O failure aborts the run:
    training without its record is not reproducible).
    """

    def __init__(self, num_nodes: int, csv_path: Path | None = None):
        self.num_nodes = num_nodes
        self.rows: list[TraceRow] = []
        self._fh = None
        if csv_path is not None:
            self._fh = open(csv_path, "w", encoding="utf-8", newline="\n")
            self._fh.write(csv_header(num_nodes) + "\n")

    def append(self, episode: int, step: int, probs: np.ndarray) -> None:
        if self.rows and episode < self.rows[-1].episode:
            raise ValueError("episode indices must be non-decreasing")
        if abs(float(probs.sum()) - 1.0) > 1e-6:
            raise ValueError("logged probability row does not sum to 1")
        row = TraceRow(episode, step, np.array(probs))
        self.rows.append(row)
        if self._fh is not None:
            self._fh.write(format_csv_row(row) + "\n")

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def csv_header(num_nodes: int) -> str:
    return "episode,step," + ",".join(f"p_{i}" for i in range(num_nodes))


def format_csv_row(row: TraceRow) -> str:
    return f"{row.episode},{row.step}," + ",".join(f"{p:.6f}" for p in row.probs)


@dataclass
class TrainReport:
    episodes_run: int
    aborted_episodes: int
    steps_total: int
    converged_at: int | None
    fit_calls: int = 0
    dead_end_aborts: int = 0
    cap_aborts: int = 0  # step-cap force-aborts; dead ends are counted separately
    step_cap: int = 0

    def to_dict(self) -> dict:
        return {
            "episodes_run": self.episodes_run,
            "aborted_episodes": self.aborted_episodes,
            "steps_total": self.steps_total,
            "converged_at": self.converged_at,
            "fit_calls": self.fit_calls,
            "dead_end_aborts": self.dead_end_aborts,
            "cap_aborts": self.cap_aborts,
            "step_cap": self.step_cap,
        }


def save_action_probs(model: PolicyNet, env: PathEnv, episode: int, step: int, log: TraceLog) -> None:
    """Append one row: the prediction for the one-hot start-node input."""
    probs = forward(model, one_hot(env.num_nodes, env.start_node))
    log.append(episode, step, probs)


def compute_converged_at(rows: list[TraceRow]) -> int | None:
    """First episode whose logged row starts a run of 10 rows with max >= 0.9."""
    run = 0
    for i, row in enumerate(rows):
        if float(np.max(row.probs)) >= CONVERGENCE_THRESHOLD:
            run += 1
            if run == CONVERGENCE_PERSISTENCE:
                return rows[i - CONVERGENCE_PERSISTENCE + 1].episode
        else:
            run = 0
    return None


def train(model: PolicyNet, env: PathEnv, cfg: TrainConfig, rng: np.random.Generator | None = None):
    """Run the episode loop; returns (model, TraceLog, TrainReport).

    Episodes exceeding cfg.step_cap are force-aborted like a dead end
    (no fit for the cut-off step) and counted in the report, because a
    cycling walk has no natural length bound.
    """
    if model.input_dim != env.num_nodes or model.output_dim != env.num_nodes:
        raise ValueError(
            f"model dims ({model.input_dim}->{model.output_dim}) "
            f"!= num_nodes ({env.num_nodes})"
        )
    if cfg.num_episodes < 1:
        raise ValueError("num_episodes must be >= 1")
    step_cap = cfg.step_cap if cfg.step_cap is not None else 50 * env.num_nodes
    if step_cap < env.num_nodes:
        raise ValueError(f"step_cap {step_cap} < num_nodes {env.num_nodes}")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    log = TraceLog(env.num_nodes, cfg.log_path)
    report = TrainReport(
        episodes_run=0, aborted_episodes=0, steps_total=0, converged_at=None, step_cap=step_cap
    )
    try:
        for ep in range(cfg.num_episodes):
            state = env.reset()
            step = 0
            while env.current_node != env.end_node:
                if step >= step_cap:
                    env.abort_on_dead_end()
                    report.cap_aborts += 1
                    report.aborted_episodes += 1
                    break
                action_probs = forward(model, state)
                save_action_probs(model, env, ep, step, log)
                report.steps_total += 1
                step += 1

                masked, dead_end = mask_and_renormalize(action_probs, env.current_row())
                if dead_end:
                    env.abort_on_dead_end()
                    report.dead_end_aborts += 1
                    report.aborted_episodes += 1
                    continue

                next_node = sample_action(masked, rng)
                outcome = env.step(next_node)
                target = make_target(env.num_nodes, next_node, outcome.reward)
                step_loss = train_step(model, state, target)
                report.fit_calls += 1
                if not math.isfinite(step_loss):
                    raise TrainingError(
                        f"non-finite loss {step_loss} in episode {ep}", net=model, episode=ep
                    )
                state = outcome.next_state
            report.episodes_run += 1
    except policynet.NumericError as e:
        raise TrainingError(str(e), net=model) from e
    finally:
        log.close()

    report.converged_at = compute_converged_at(log.rows)
    return model, log, report
