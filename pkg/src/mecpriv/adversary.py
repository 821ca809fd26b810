"""MAP attacker inferring demand and channel from the offloading volume.

A compromised server sees only the per-slot offload count t. The attacker
fits conditional frequency tables p(d|t) and p(g|t) on one trace and
guesses by argmax on another. The achievable success rate is bounded by
the expected max-conditional, which shrinks as H(D|T) grows; both sides
of that bound are computed here so runs can verify it empirically.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

Trace = "np.ndarray | list[tuple[int, int, int]]"  # rows of (d, g, t)


@dataclass
class AttackerModel:
    """Conditional frequency tables fitted from a (d, g, t) trace."""

    p_t: dict[int, float]
    p_d_given_t: dict[int, np.ndarray]
    p_g_given_t: dict[int, np.ndarray]
    n_d: int
    n_g: int
    seen_t: frozenset[int] = field(default_factory=frozenset)

    def d_conditional(self, t: int) -> np.ndarray:
        if t in self.p_d_given_t:
            return self.p_d_given_t[t]
        return np.full(self.n_d, 1.0 / self.n_d)  # unseen t: uniform fallback

    def g_conditional(self, t: int) -> np.ndarray:
        if t in self.p_g_given_t:
            return self.p_g_given_t[t]
        return np.full(self.n_g, 1.0 / self.n_g)


@dataclass(frozen=True)
class AttackReport:
    success_d: float
    success_g: float
    bound_d: float
    bound_g: float
    n_eval: int
    unseen_t: tuple[int, ...]

    def within_bound(self, slack: float = 0.02) -> bool:
        return (self.success_d <= self.bound_d + slack
                and self.success_g <= self.bound_g + slack)


def _as_array(trace) -> np.ndarray:
    arr = np.asarray(trace, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 3 or arr.shape[0] == 0:
        raise ValueError("trace must be a non-empty sequence of (d, g, t)")
    return arr


def fit(trace, n_d: int | None = None, n_g: int | None = None) -> AttackerModel:
    """Maximum-likelihood conditional tables from an observed trace."""
    arr = _as_array(trace)
    d, g, t = arr[:, 0], arr[:, 1], arr[:, 2]
    n_d = n_d or int(d.max()) + 1
    n_g = n_g or int(g.max()) + 1
    n = len(arr)
    p_t: dict[int, float] = {}
    p_d: dict[int, np.ndarray] = {}
    p_g: dict[int, np.ndarray] = {}
    for tv in np.unique(t):
        sel = t == tv
        m = int(sel.sum())
        p_t[int(tv)] = m / n
        p_d[int(tv)] = np.bincount(d[sel], minlength=n_d) / m
        p_g[int(tv)] = np.bincount(g[sel], minlength=n_g) / m
    return AttackerModel(p_t=p_t, p_d_given_t=p_d, p_g_given_t=p_g,
                         n_d=n_d, n_g=n_g, seen_t=frozenset(p_t))


def map_estimate(model: AttackerModel, t: int) -> tuple[int, int]:
    """Most likely (d, g) given the observed volume; ties pick the smallest."""
    return (int(np.argmax(model.d_conditional(t))),
            int(np.argmax(model.g_conditional(t))))


def attack_evaluation(eval_trace, model: AttackerModel) -> AttackReport:
    """Empirical attack success on a held-out trace, plus the success bound.

    The bound is the expected max-conditional under the evaluation trace's
    own empirical distribution, i.e. the best possible guessing rate.
    """
    arr = _as_array(eval_trace)
    eval_tables = fit(arr, n_d=model.n_d, n_g=model.n_g)
    hit_d = hit_g = 0
    unseen = set()
    for d, g, t in arr:
        d_hat, g_hat = map_estimate(model, int(t))
        hit_d += int(d_hat == d)
        hit_g += int(g_hat == g)
        if int(t) not in model.seen_t:
            unseen.add(int(t))
    n = len(arr)
    bound_d = sum(p * eval_tables.p_d_given_t[t].max()
                  for t, p in eval_tables.p_t.items())
    bound_g = sum(p * eval_tables.p_g_given_t[t].max()
                  for t, p in eval_tables.p_t.items())
    return AttackReport(success_d=hit_d / n, success_g=hit_g / n,
                        bound_d=float(bound_d), bound_g=float(bound_g),
                        n_eval=n, unseen_t=tuple(sorted(unseen)))


def format_report(label: str, report: AttackReport) -> str:
    lines = [
        f"attack report: {label}",
        f"  eval steps          {report.n_eval}",
        f"  demand guess rate   {report.success_d:.4f} (bound {report.bound_d:.4f})",
        f"  channel guess rate  {report.success_g:.4f} (bound {report.bound_g:.4f})",
        f"  bound respected     {report.within_bound()}",
    ]
    if report.unseen_t:
        lines.append(f"  unseen volumes      {list(report.unseen_t)} (uniform fallback)")
    return "\n".join(lines)
