"""Episode execution and metric aggregation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..baselines import Policy
from ..env import EnvParams, reward, sample_initial_state, step
from ..privacy import DEFAULT_HEURISTIC, WindowHistory, privacy_breakdown


@dataclass
class EpisodeLog:
    """Per-step arrays for one episode, plus task accounting totals."""

    d: np.ndarray
    b: np.ndarray
    g: np.ndarray
    q: np.ndarray
    t: np.ndarray
    l: np.ndarray
    latency: np.ndarray
    energy: np.ndarray
    cost: np.ndarray
    h_dt: np.ndarray
    h_gt: np.ndarray
    p_total: np.ndarray
    heuristic: np.ndarray
    reward: np.ndarray
    buffer_final: int


@dataclass(frozen=True)
class EpisodeMetrics:
    avg_cost_per_task: float
    avg_delay_per_task: float
    avg_energy_per_task: float
    h_dt: float
    h_gt: float
    heuristic: float
    avg_reward_per_step: float
    tasks_handled: int
    tasks_generated: int
    buffer_final: int


METRIC_FIELDS = ("avg_cost_per_task", "avg_delay_per_task",
                 "avg_energy_per_task", "h_dt", "h_gt", "heuristic",
                 "avg_reward_per_step")


@dataclass(frozen=True)
class RunRecord:
    """Aggregated evaluation row: means and stds across episodes."""

    label: str
    avg_cost_per_task: float
    avg_delay_per_task: float
    avg_energy_per_task: float
    h_dt: float
    h_gt: float
    heuristic: float
    avg_reward_per_step: float
    avg_cost_per_task_std: float
    avg_delay_per_task_std: float
    avg_energy_per_task_std: float
    h_dt_std: float
    h_gt_std: float
    heuristic_std: float
    avg_reward_per_step_std: float
    episodes: int


def run_episode(policy: Policy, env: EnvParams, rng: np.random.Generator,
                heuristic=None) -> EpisodeLog:
    """Roll one episode: act, step, push the privacy window, log everything."""
    heuristic = heuristic or DEFAULT_HEURISTIC
    n = env.episode_len
    cols = {name: np.empty(n) for name in
            ("latency", "energy", "cost", "h_dt", "h_gt", "p_total",
             "heuristic", "reward")}
    ints = {name: np.empty(n, dtype=np.int64) for name in
            ("d", "b", "g", "q", "t", "l")}
    window = WindowHistory(env.window, d_max=env.d_max, t_max=env.t_max)
    policy.reset(rng)
    s = sample_initial_state(rng, env)
    for i in range(n):
        a = policy.act(s)
        out = step(s, a, rng, env)
        window.push((s.d, s.g, a.t))
        br = privacy_breakdown(window)
        r = reward(out.cost, br.p_total, env.privacy_weight)
        ints["d"][i], ints["b"][i], ints["g"][i] = s.d, s.b, s.g
        ints["q"][i], ints["t"][i] = a.q, a.t
        ints["l"][i] = s.d + s.b - a.q - a.t
        cols["latency"][i] = out.latency
        cols["energy"][i] = out.energy
        cols["cost"][i] = out.cost
        cols["h_dt"][i] = br.h_dt
        cols["h_gt"][i] = br.h_gt
        cols["p_total"][i] = br.p_total
        cols["heuristic"][i] = heuristic.score(s, a)
        cols["reward"][i] = r
        s = out.next_state
    return EpisodeLog(**ints, **cols, buffer_final=s.b)


def episode_metrics(log: EpisodeLog) -> EpisodeMetrics:
    """Per-task averages divide by tasks completed (local + offloaded)."""
    tasks = int(log.l.sum() + log.t.sum())
    denom = float(tasks) if tasks > 0 else float("nan")
    return EpisodeMetrics(
        avg_cost_per_task=float(log.cost.sum() / denom),
        avg_delay_per_task=float(log.latency.sum() / denom),
        avg_energy_per_task=float(log.energy.sum() / denom),
        h_dt=float(log.h_dt.mean()),
        h_gt=float(log.h_gt.mean()),
        heuristic=float(log.heuristic.mean()),
        avg_reward_per_step=float(log.reward.mean()),
        tasks_handled=tasks,
        tasks_generated=int(log.d.sum()),
        buffer_final=log.buffer_final,
    )


def episode_rng(seed: int, episode: int) -> np.random.Generator:
    """Deterministic per-episode stream, independent of execution order."""
    return np.random.default_rng([seed, episode])


def evaluate(policy: Policy, env: EnvParams, episodes: int,
             seeds: tuple[int, ...], label: str, heuristic=None) -> RunRecord:
    """Average episode metrics over fresh episodes for every seed."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    rows = [episode_metrics(run_episode(policy, env, episode_rng(seed, ep),
                                        heuristic))
            for seed in seeds for ep in range(episodes)]
    values = {name: np.array([getattr(r, name) for r in rows])
              for name in METRIC_FIELDS}
    kwargs = {name: float(arr.mean()) for name, arr in values.items()}
    kwargs.update({f"{name}_std": float(arr.std()) for name, arr in values.items()})
    return RunRecord(label=label, episodes=len(rows), **kwargs)


def rollout_trace(policy: Policy, env: EnvParams, rng: np.random.Generator,
                  n_steps: int) -> np.ndarray:
    """Collect (d, g, t) rows over as many fresh episodes as needed."""
    out = np.empty((n_steps, 3), dtype=np.int64)
    i = 0
    while i < n_steps:
        policy.reset(rng)
        s = sample_initial_state(rng, env)
        for _ in range(env.episode_len):
            a = policy.act(s)
            out[i] = (s.d, s.g, a.t)
            s = step(s, a, rng, env).next_state
            i += 1
            if i == n_steps:
                break
    return out
