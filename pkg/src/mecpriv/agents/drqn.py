"""Recurrent Q-learning on observation sequences with truncated backprop.

Episodes are stored whole; training samples contiguous windows, zeroes the
hidden state at the window start, burns it in with forward passes and puts
the TD loss only on the final truncation bundle. Hidden values cross the
bundle boundary, gradients do not. The bootstrap side threads the target
network's own hidden state over the next-observation sequence.
"""
from __future__ import annotations

import numpy as np

from ..env import (Action, EnvParams, State, action_mask, reward,
                   sample_initial_state, state_id, step, valid_mask_matrix)
from ..nn import (backward, clone_params, forward, forward_step, init_hidden,
                  init_params, make_optimizer, polyak_update)
from ..privacy import WindowHistory, privacy_breakdown
from .common import (AgentConfig, RewardBaseline, TrainResult,
                     drqn_network_spec, encode_observation, epsilon_at,
                     epsilon_greedy, loss_gradient, obs_dim, state_dim)
from .replay import EpisodeBuffer, EpisodeTrace


def _one_hot_obs(d, b, g, prev, env: EnvParams) -> np.ndarray:
    """Vectorized observation encoding for (T, B) index arrays.

    prev entries of -1 mean no previous action (zeros in the action slot).
    """
    T, B = d.shape
    x = np.zeros((T, B, obs_dim(env)))
    tt = np.arange(T)[:, None]
    bb = np.arange(B)[None, :]
    x[tt, bb, d] = 1.0
    x[tt, bb, env.d_max + 1 + b] = 1.0
    x[tt, bb, env.d_max + 1 + env.b_max + 1 + g] = 1.0
    ti, bi = np.nonzero(prev >= 0)
    x[ti, bi, state_dim(env) + prev[ti, bi]] = 1.0
    return x


def _window_batch(windows, T: int, env: EnvParams):
    """Encode sampled windows into online/target input sequences."""
    sl = lambda arr, w, n: arr[w:w + n]
    d = np.stack([sl(ep.d, w, T + 1) for ep, w in windows], axis=1)
    b = np.stack([sl(ep.b, w, T + 1) for ep, w in windows], axis=1)
    g = np.stack([sl(ep.g, w, T + 1) for ep, w in windows], axis=1)
    acts = np.stack([sl(ep.actions, w, T) for ep, w in windows], axis=1)
    rews = np.stack([sl(ep.rewards, w, T) for ep, w in windows], axis=1)
    prev = np.vstack([
        [(ep.actions[w - 1] if w > 0 else -1) for ep, w in windows],
        acts[:-1]])
    x_on = _one_hot_obs(d[:-1], b[:-1], g[:-1], prev, env)
    x_tg = _one_hot_obs(d[1:], b[1:], g[1:], acts, env)
    next_ids = state_id(d[1:], b[1:], g[1:], env)
    return x_on, x_tg, acts, rews, next_ids


def drqn_update(spec, params, target_params, opt, windows, env: EnvParams,
                cfg: AgentConfig, baseline: float = 0.0):
    """One truncated-BPTT gradient step; returns (params, loss)."""
    T, L = cfg.seq_len, cfg.tbptt_len
    burn = T - L
    x_on, x_tg, acts, rews, next_ids = _window_batch(windows, T, env)
    rews = rews - baseline
    B = len(windows)
    h_on = h_tg = None
    if burn > 0:
        _, h_on, _ = forward(spec, params, x_on[:burn], collect_cache=False)
        _, h_tg, _ = forward(spec, target_params, x_tg[:burn],
                             collect_cache=False)
    q_on, _, cache = forward(spec, params, x_on[burn:], h_on)
    q_tg, _, _ = forward(spec, target_params, x_tg[burn:], h_tg,
                         collect_cache=False)
    valid = valid_mask_matrix(env)[next_ids[burn:]]  # (L, B, A)
    best = np.where(valid, q_tg, -np.inf).max(axis=2)
    y = rews[burn:] + cfg.gamma * best
    rows = np.arange(B)
    cols = acts[burn:]
    kk = np.arange(L)[:, None]
    taken = q_on[kk, rows, cols]
    err = taken - y
    dout = np.zeros_like(q_on)
    dout[kk, rows, cols] = loss_gradient(err, cfg.loss)
    grads = backward(cache, dout)
    return opt.step(params, grads), float(np.mean(err * err))


def train_drqn(env: EnvParams, cfg: AgentConfig, rng: np.random.Generator,
               label: str = "drqn") -> TrainResult:
    """Train the recurrent agent; returns parameters and learning curve."""
    if cfg.seq_len > env.episode_len:
        raise ValueError("seq_len cannot exceed episode_len")
    spec = drqn_network_spec(env, cfg)
    params = init_params(spec, rng)
    target = clone_params(params)
    opt = make_optimizer(cfg.optimizer, cfg.alpha)
    buf = EpisodeBuffer(cfg.buffer_capacity)
    baseline = RewardBaseline(cfg.center_rewards)
    curve: list[tuple[int, float, float]] = []
    grad_steps = 0
    n_steps = env.episode_len
    for ep in range(cfg.episodes):
        eps = epsilon_at(cfg, ep)
        s = sample_initial_state(rng, env)
        window = WindowHistory(env.window, d_max=env.d_max, t_max=env.t_max)
        h = init_hidden(spec, 1)
        prev: int | None = None
        sd = np.empty(n_steps + 1, dtype=np.int64)
        sb = np.empty(n_steps + 1, dtype=np.int64)
        sg = np.empty(n_steps + 1, dtype=np.int64)
        acts = np.empty(n_steps, dtype=np.int64)
        rews = np.empty(n_steps)
        total = 0.0
        for n in range(n_steps):
            x = encode_observation(s, prev, env)[None, :]
            q, h = forward_step(spec, params, x, h)
            mask = action_mask(s, env)
            a_idx = epsilon_greedy(q[0], mask, eps, rng)
            assert mask[a_idx], "masking violated"
            a = env.action_from_index(a_idx)
            out = step(s, a, rng, env)
            window.push((s.d, s.g, a.t))
            r = reward(out.cost, privacy_breakdown(window).p_total,
                       env.privacy_weight)
            sd[n], sb[n], sg[n] = s.d, s.b, s.g
            acts[n] = a_idx
            rews[n] = r
            baseline.add(r)
            total += r
            s = out.next_state
            prev = a_idx
            if len(buf) > 0 and n % cfg.update_every == 0:
                windows = buf.sample_windows(cfg.batch_size, cfg.seq_len, rng)
                params, _ = drqn_update(spec, params, target, opt, windows,
                                        env, cfg, baseline.value)
                grad_steps += 1
                if grad_steps % cfg.target_update_period == 0:
                    if cfg.polyak_conventional:
                        target = polyak_update(online=params, target=target,
                                               tau=1.0 - cfg.tau)
                    else:
                        target = polyak_update(target, params, cfg.tau)
        sd[n_steps], sb[n_steps], sg[n_steps] = s.d, s.b, s.g
        buf.push(EpisodeTrace(sd, sb, sg, acts, rews))
        curve.append((ep, total, eps))
    return TrainResult(label=label, spec=spec, params=params, curve=curve)


class DRQNPolicy:
    """Greedy recurrent policy; hidden state threads across an episode."""

    def __init__(self, spec, params, env: EnvParams):
        self.spec = spec
        self.params = params
        self.env = env
        self._h = init_hidden(spec, 1)
        self._prev: int | None = None

    def reset(self, rng: np.random.Generator) -> None:
        self._h = init_hidden(self.spec, 1)
        self._prev = None

    def act(self, s: State) -> Action:
        x = encode_observation(s, self._prev, self.env)[None, :]
        q, self._h = forward_step(self.spec, self.params, x, self._h)
        masked = np.where(action_mask(s, self.env), q[0], -np.inf)
        a_idx = int(np.argmax(masked))
        self._prev = a_idx
        return self.env.action_from_index(a_idx)
