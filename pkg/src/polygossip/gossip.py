"""Synchronous averaging iterations over a shared step-wise contract.

Every method is an object with a round counter `t`, a `step()` advancing one
synchronous communication round, and `estimate()` exposing the current
per-vertex estimate vector. Distinct iterators share nothing, so independent
runs (e.g. experiment repetitions) can execute concurrently.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from .graphgen import Graph, GossipMatrix
from .orthopoly import (
    GapRecurrence,
    Recurrence,
    jacobi_gap_recurrence,
    jacobi_general_recurrence,
    jacobi_recurrence,
)

__all__ = [
    "SimpleGossip",
    "ShiftRegister",
    "RecurrenceIteration",
    "JacobiGapIteration",
    "ParameterFreeIteration",
    "MessagePassing",
    "MessagePassingRegular",
    "LocalAverage",
    "simple_gossip",
    "shift_register",
    "jacobi_iteration",
    "jacobi_general_iteration",
    "jacobi_gap_iteration",
    "parameter_free_iteration",
    "message_passing",
    "message_passing_regular",
    "local_average_oracle",
]


def _check_signal(n: int, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (n,):
        raise ValueError(f"signal has shape {xi.shape}, expected ({n},)")
    return xi.copy()


class SimpleGossip:
    """x^{t+1} = W x^t: one sparse matrix-vector product per round."""

    def __init__(self, W: GossipMatrix, xi):
        self.W = W
        self.n = W.n
        self.x = _check_signal(W.n, xi)
        self.t = 0

    def step(self) -> None:
        self.x = self.W.matvec(self.x)
        self.t += 1

    def estimate(self) -> np.ndarray:
        return self.x


class ShiftRegister:
    """Two-register relaxation x^{t+1} = omega W x^t + (1 - omega) x^{t-1}.

    omega = 1 degenerates to simple gossip; the tuned value for a given
    spectral gap comes from orthopoly.shift_register_omega.
    """

    def __init__(self, W: GossipMatrix, xi, omega: float):
        if not (1.0 <= omega <= 2.0):
            raise ValueError("omega must lie in [1, 2]")
        self.W = W
        self.n = W.n
        self.omega = float(omega)
        self.x = _check_signal(W.n, xi)
        self.x_prev = self.x
        self.t = 0

    def step(self) -> None:
        if self.t == 0:
            self.x_prev, self.x = self.x, self.W.matvec(self.x)
        else:
            nxt = self.omega * self.W.matvec(self.x) + (1.0 - self.omega) * self.x_prev
            self.x_prev, self.x = self.x, nxt
        self.t += 1

    def estimate(self) -> np.ndarray:
        return self.x


class RecurrenceIteration:
    """Second-order iteration driven by a normalized coefficient triple:

        x^1     = a_0 W xi + b_0 xi
        x^{t+1} = a_t W x^t + b_t x^t - c_t x^{t-1}

    Realizes x^t = pi_t(W) xi for the polynomial family the recurrence encodes.
    """

    def __init__(self, W: GossipMatrix, xi, recurrence: Recurrence):
        self.W = W
        self.n = W.n
        self.rec = recurrence
        self.x = _check_signal(W.n, xi)
        self.x_prev = self.x
        self.t = 0

    def step(self) -> None:
        t = self.t
        a, b = float(self.rec.a(t)), float(self.rec.b(t))
        if t == 0:
            self.x_prev, self.x = self.x, a * self.W.matvec(self.x) + b * self.x
        else:
            c = float(self.rec.c(t))
            nxt = a * self.W.matvec(self.x) + b * self.x - c * self.x_prev
            self.x_prev, self.x = self.x, nxt
        self.t += 1

    def estimate(self) -> np.ndarray:
        return self.x


class JacobiGapIteration:
    """Gap-rescaled second-order iteration with running normalization.

    Maintains the unnormalized pair (y^t, delta_t) and outputs x^t = y^t /
    delta_t. All four carried quantities are divided by delta_t each round;
    the common scaling leaves x^t invariant and prevents the geometric growth
    of delta_t (which would overflow doubles near t ~ 700 for small gamma).
    """

    def __init__(self, W: GossipMatrix, xi, d: float, gamma: float):
        self.W = W
        self.n = W.n
        self.gaprec: GapRecurrence = jacobi_gap_recurrence(d, gamma)
        self.y = _check_signal(W.n, xi)
        self.y_prev = self.y
        self.delta = 1.0
        self.delta_prev = 1.0
        self.t = 0

    def step(self) -> None:
        t = self.t
        a, b = float(self.gaprec.a(t)), float(self.gaprec.b(t))
        if t == 0:
            self.y_prev, self.y = self.y, a * self.W.matvec(self.y) + b * self.y
            self.delta_prev, self.delta = self.delta, a + b
        else:
            c = float(self.gaprec.c(t))
            y_next = a * self.W.matvec(self.y) + b * self.y - c * self.y_prev
            d_next = (a + b) * self.delta - c * self.delta_prev
            self.y_prev, self.y = self.y, y_next
            self.delta_prev, self.delta = self.delta, d_next
        scale = self.delta
        self.y_prev = self.y_prev / scale
        self.y = self.y / scale
        self.delta_prev = self.delta_prev / scale
        self.delta = 1.0
        self.t += 1

    def estimate(self) -> np.ndarray:
        return self.y / self.delta


class ParameterFreeIteration:
    """Optimal second-order iteration with coefficients computed online.

    The two inner-product ratios
        b_t = -<x^t - W x^t, W x^t> / <x^t, x^t - W x^t>
        c_t =  <W x^t, x^{t-1} - W x^{t-1}> / <x^{t-1}, x^{t-1} - W x^{t-1}>
    reproduce the error-minimizing polynomial family of the signal's own
    spectral measure. <x, x - W x> is the remaining weighted error mass; once
    it falls below `terminate_rel * ||xi||^2` the coefficient formulas are
    0/0, consensus has been reached, and the iterate is held constant.
    """

    def __init__(self, W: GossipMatrix, xi, terminate_rel: float = 1e-13):
        self.W = W
        self.n = W.n
        self.x = _check_signal(W.n, xi)
        self.x_prev = self.x
        self.wx = W.matvec(self.x)
        self.wx_prev = self.wx
        self.threshold = terminate_rel * float(self.x @ self.x)
        self.terminated = False
        self.terminated_at: int | None = None
        self.t = 0
        if self._den(self.x, self.wx) <= self.threshold:
            self.terminated = True
            self.terminated_at = 0

    @staticmethod
    def _den(x: np.ndarray, wx: np.ndarray) -> float:
        return float(x @ (x - wx))

    def step(self) -> None:
        if self.terminated:
            self.t += 1
            return
        den = self._den(self.x, self.wx)
        if den <= self.threshold:
            self.terminated = True
            self.terminated_at = self.t
            self.t += 1
            return
        b = -float((self.x - self.wx) @ self.wx) / den
        if self.t == 0:
            nxt = (self.wx + b * self.x) / (1.0 + b)
        else:
            den_prev = self._den(self.x_prev, self.wx_prev)
            c = float(self.wx @ (self.x_prev - self.wx_prev)) / den_prev
            nxt = (self.wx + b * self.x - c * self.x_prev) / (1.0 + b - c)
        self.x_prev, self.x = self.x, nxt
        self.wx_prev, self.wx = self.wx, self.W.matvec(nxt)
        self.t += 1

    def estimate(self) -> np.ndarray:
        return self.x


class MessagePassing:
    """Count/average message passing over directed edges.

    Each directed edge (v, w) carries a running count K_vw and average M_vw of
    the observations collected on v's side; both update synchronously from the
    opposite-direction messages entering v. On trees K_vw equals the size of
    the ball growing away from w, and the vertex outputs are exact ball
    averages. Runs on any graph; only trees and regular graphs carry
    guarantees.
    """

    def __init__(self, g: Graph, xi):
        self.g = g
        self.n = g.n
        self.xi = _check_signal(g.n, xi)
        src, dst = [], []
        eid = {}
        for v in range(g.n):
            for w in g.adjacency[v]:
                eid[(v, w)] = len(src)
                src.append(v)
                dst.append(w)
        self.src = np.array(src, dtype=np.int64)
        self.dst = np.array(dst, dtype=np.int64)
        self.rev = np.array([eid[(w, v)] for v, w in zip(src, dst)], dtype=np.int64)
        self.K = np.zeros(len(src))
        self.M = np.zeros(len(src))
        self.t = 0

    def _incoming(self) -> tuple[np.ndarray, np.ndarray]:
        tot_k = np.bincount(self.dst, weights=self.K, minlength=self.n)
        tot_km = np.bincount(self.dst, weights=self.K * self.M, minlength=self.n)
        return tot_k, tot_km

    def step(self) -> None:
        tot_k, tot_km = self._incoming()
        # K^{t+1}_{vw} = 1 + sum of K entering v except from w; always >= 1
        k_new = 1.0 + tot_k[self.src] - self.K[self.rev]
        m_new = (
            self.xi[self.src] + tot_km[self.src] - self.K[self.rev] * self.M[self.rev]
        ) / k_new
        self.K, self.M = k_new, m_new
        self.t += 1

    def estimate(self) -> np.ndarray:
        tot_k, tot_km = self._incoming()
        return (self.xi + tot_km) / (1.0 + tot_k)


class MessagePassingRegular:
    """Vertex-form message passing on a d-regular graph.

    On regular graphs all edge counts agree, so the edge recursion collapses to
        L_{t+1} = 2 + (d-1) L_t,          L_0 = 1
        S^{t+1} = A S^t - (d-1) S^{t-1},  S^0 = xi, S^1 = xi + A xi
        x^t     = S^t / L_t
    and the trajectory matches the edge form exactly.
    """

    def __init__(self, g: Graph, xi):
        deg = g.degrees()
        if g.n == 0 or not g.is_regular() or deg[0] < 2:
            raise ValueError("message_passing_regular requires a d-regular graph, d >= 2")
        self.d = int(deg[0])
        self.n = g.n
        self.A = g.adjacency_csr()
        self.xi = _check_signal(g.n, xi)
        self.S = self.xi.copy()
        self.S_prev = self.S
        self.L = 1.0
        self.L_prev = 1.0
        self.t = 0

    def step(self) -> None:
        if self.t == 0:
            self.S_prev, self.S = self.S, self.xi + self.A @ self.xi
            self.L_prev, self.L = self.L, float(self.d + 1)
        else:
            s_next = self.A @ self.S - (self.d - 1) * self.S_prev
            l_next = 2.0 + (self.d - 1) * self.L
            self.S_prev, self.S = self.S, s_next
            self.L_prev, self.L = self.L, l_next
        self.t += 1

    def estimate(self) -> np.ndarray:
        return self.S / self.L


class LocalAverage:
    """Exact unweighted ball averages x^t_v = mean of xi over B_t(v).

    A lower-bound baseline, not a distributed method: it needs all-pairs
    shortest-path distances, computed once up front (pass `distances` to share
    the matrix across signals on the same graph).
    """

    def __init__(self, g: Graph, xi, distances: np.ndarray | None = None):
        self.g = g
        self.n = g.n
        self.xi = _check_signal(g.n, xi)
        if distances is None:
            distances = graph_distances(g)
        self.dist = distances
        self.t = 0

    def step(self) -> None:
        self.t += 1

    def estimate(self) -> np.ndarray:
        mask = self.dist <= self.t
        counts = mask.sum(axis=1)
        sums = mask @ self.xi
        return sums / counts


def graph_distances(g: Graph) -> np.ndarray:
    """All-pairs shortest-path distance matrix (np.inf across components)."""
    if g.edge_count == 0:
        out = np.full((g.n, g.n), np.inf)
        np.fill_diagonal(out, 0.0)
        return out
    return shortest_path(g.adjacency_csr(), method="D", unweighted=True, directed=False)


def simple_gossip(W: GossipMatrix, xi) -> SimpleGossip:
    return SimpleGossip(W, xi)


def shift_register(W: GossipMatrix, xi, omega: float) -> ShiftRegister:
    return ShiftRegister(W, xi, omega)


def jacobi_iteration(W: GossipMatrix, xi, d) -> RecurrenceIteration:
    return RecurrenceIteration(W, xi, jacobi_recurrence(d))


def jacobi_general_iteration(W: GossipMatrix, xi, alpha, beta) -> RecurrenceIteration:
    return RecurrenceIteration(W, xi, jacobi_general_recurrence(alpha, beta))


def jacobi_gap_iteration(W: GossipMatrix, xi, d, gamma) -> JacobiGapIteration:
    return JacobiGapIteration(W, xi, d, gamma)


def parameter_free_iteration(W: GossipMatrix, xi) -> ParameterFreeIteration:
    return ParameterFreeIteration(W, xi)


def message_passing(g: Graph, xi) -> MessagePassing:
    return MessagePassing(g, xi)


def message_passing_regular(g: Graph, xi) -> MessagePassingRegular:
    return MessagePassingRegular(g, xi)


def local_average_oracle(g: Graph, xi, t: int) -> np.ndarray:
    """Ball-average vector at a single time t."""
    if t < 0:
        raise ValueError("t must be >= 0")
    it = LocalAverage(g, xi)
    it.t = t
    return it.estimate()
