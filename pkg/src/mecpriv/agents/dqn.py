"""Feed-forward Q-learning on the current state with replay and soft targets."""
from __future__ import annotations

import numpy as np

from ..env import (Action, EnvParams, State, action_mask, reward,
                   sample_initial_state, step)
from ..nn import (backward, clone_params, forward, make_optimizer,
                  polyak_update)
from ..privacy import WindowHistory, privacy_breakdown
from .common import (AgentConfig, RewardBaseline, TrainResult,
                     dqn_network_spec, encode_state, encode_states,
                     epsilon_at, epsilon_greedy, loss_gradient, masked_max)
from .replay import Transition, TransitionBuffer


class DenseQ:
    """Bundles spec, parameters and env for batched Q evaluation."""

    def __init__(self, spec, params, env: EnvParams):
        self.spec = spec
        self.params = params
        self.env = env

    def q_batch(self, states) -> np.ndarray:
        xs = encode_states(states, self.env)[None, :, :]
        out, _, _ = forward(self.spec, self.params, xs, collect_cache=False)
        return out[0]

    def q_single(self, s: State) -> np.ndarray:
        return self.q_batch([s])[0]


def td_targets(batch, q_target: DenseQ, gamma: float,
               baseline: float = 0.0) -> np.ndarray:
    """Bootstrap targets r + gamma * max over valid next actions."""
    if not batch:
        raise ValueError("empty batch")
    next_states = [tr.s_next for tr in batch]
    q_next = q_target.q_batch(next_states)
    best = masked_max(q_next, next_states, q_target.env)
    rewards = np.array([tr.r for tr in batch])
    return rewards - baseline + gamma * best


def dqn_update(spec, params, target_params, opt, batch, env: EnvParams,
               cfg: AgentConfig, baseline: float = 0.0):
    """One gradient step on the mean TD loss; returns (params, loss)."""
    y = td_targets(batch, DenseQ(spec, target_params, env), cfg.gamma,
                   baseline)
    states = [tr.s for tr in batch]
    actions = np.array([tr.a for tr in batch])
    xs = encode_states(states, env)[None, :, :]
    out, _, cache = forward(spec, params, xs)
    taken = out[0][np.arange(len(batch)), actions]
    err = taken - y
    dout = np.zeros_like(out)
    dout[0][np.arange(len(batch)), actions] = loss_gradient(err, cfg.loss)
    grads = backward(cache, dout)
    new_params = opt.step(params, grads)
    return new_params, float(np.mean(err * err))


def train_dqn(env: EnvParams, cfg: AgentConfig, rng: np.random.Generator,
              label: str = "dqn") -> TrainResult:
    """Replay-based Q-learning loop over full episodes.

    Per step: epsilon-greedy action over valid choices, environment step,
    privacy window push, reward, transition storage and (every
    update_every steps once the buffer holds a batch) one gradient step
    with a soft target update every target_update_period gradient steps.
    """
    spec = dqn_network_spec(env, cfg)
    from ..nn import init_params
    params = init_params(spec, rng)
    target = clone_params(params)
    opt = make_optimizer(cfg.optimizer, cfg.alpha)
    buf = TransitionBuffer(cfg.buffer_capacity)
    baseline = RewardBaseline(cfg.center_rewards)
    curve: list[tuple[int, float, float]] = []
    grad_steps = 0
    for ep in range(cfg.episodes):
        eps = epsilon_at(cfg, ep)
        s = sample_initial_state(rng, env)
        window = WindowHistory(env.window, d_max=env.d_max, t_max=env.t_max)
        total = 0.0
        for n in range(env.episode_len):
            mask = action_mask(s, env)
            q = DenseQ(spec, params, env).q_single(s)
            a_idx = epsilon_greedy(q, mask, eps, rng)
            assert mask[a_idx], "masking violated"
            a = env.action_from_index(a_idx)
            out = step(s, a, rng, env)
            window.push((s.d, s.g, a.t))
            r = reward(out.cost, privacy_breakdown(window).p_total,
                       env.privacy_weight)
            buf.push(Transition(s, a_idx, r, out.next_state))
            baseline.add(r)
            total += r
            s = out.next_state
            if len(buf) >= cfg.batch_size and n % cfg.update_every == 0:
                batch = buf.sample(cfg.batch_size, rng)
                params, _ = dqn_update(spec, params, target, opt, batch,
                                       env, cfg, baseline.value)
                grad_steps += 1
                if grad_steps % cfg.target_update_period == 0:
                    if cfg.polyak_conventional:
                        target = polyak_update(online=params, target=target,
                                               tau=1.0 - cfg.tau)
                    else:
                        target = polyak_update(target, params, cfg.tau)
        curve.append((ep, total, eps))
    return TrainResult(label=label, spec=spec, params=params, curve=curve)


class DQNPolicy:
    """Greedy policy of a trained feed-forward net, tabulated per state."""

    def __init__(self, spec, params, env: EnvParams):
        self.env = env
        q = DenseQ(spec, params, env)
        self._table: dict[State, Action] = {}
        for s in env.all_states():
            masked = np.where(action_mask(s, env), q.q_single(s), -np.inf)
            self._table[s] = env.action_from_index(int(np.argmax(masked)))

    def reset(self, rng: np.random.Generator) -> None:
        pass

    def act(self, s: State) -> Action:
        return self._table[s]

    def action_table(self) -> dict[State, Action]:
        return dict(self._table)
