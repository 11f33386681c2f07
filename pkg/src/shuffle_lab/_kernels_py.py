"""Numpy fallback for the hot trajectory kernels.

Same stream/consumption contract as the compiled module (see
``shuffle_lab.backend``); vectorized across trajectories.  Integer and state
outputs are bit-identical to the compiled kernels; phi values agree to within
summation-order noise (~1e-12).
"""

from __future__ import annotations

import numpy as np

COMPILED = False

KIND_OVERHAND = 0
KIND_CIRCULAR = 1
KIND_RUDVALIS = 2

_U = np.uint64
_GOLDEN = _U(0x9E3779B97F4A7C15)
_M1 = _U(0xBF58476D1CE4E5B9)
_M2 = _U(0x94D049BB133111EB)
_INV53 = 2.0**-53


def _mix64(z):
    z = z ^ (z >> _U(30))
    z = z * _M1
    z = z ^ (z >> _U(27))
    z = z * _M2
    z = z ^ (z >> _U(31))
    return z


def _u64(x: int) -> np.uint64:
    return _U(x & 0xFFFFFFFFFFFFFFFF)


def _stream_bases(seed: int, stream0: int, count: int) -> np.ndarray:
    streams = _u64(stream0) + np.arange(count, dtype=_U)
    seedmix = _mix64(np.full(count, _u64(seed), dtype=_U))
    return _mix64(seedmix + _GOLDEN * streams)


def stream_u64(seed: int, stream: int, offset: int, count: int) -> np.ndarray:
    """Raw draws offset..offset+count-1 of one stream (contract test hook)."""
    base = _stream_bases(seed, stream, 1)[0]
    idx = _u64(offset) + np.arange(1, count + 1, dtype=_U)
    return _mix64(base + idx * _GOLDEN)


def _draw_block(bases, ctrs, k):
    """k consecutive draws per row; callers advance ctrs themselves."""
    idx = ctrs[:, None] + np.arange(1, k + 1, dtype=_U)[None, :]
    return _mix64(bases[:, None] + idx * _GOLDEN)


def _uniform_block(bases, ctrs, k):
    return (_draw_block(bases, ctrs, k) >> _U(11)).astype(np.float64) * _INV53


def _step_overhand_batch(state, bases, ctrs, p):
    B, n = state.shape
    u = _uniform_block(bases, ctrs, n - 1)
    ctrs += _U(n - 1)
    f = u < p
    slots = np.arange(1, n, dtype=np.int64)
    cutslot = np.where(f, slots[None, :], 0)
    prev = np.zeros((B, n), dtype=np.int64)
    prev[:, 1:] = np.maximum.accumulate(cutslot, axis=1)
    nxtslot = np.where(f, slots[None, :], n)
    nxt = np.full((B, n), n, dtype=np.int64)
    nxt[:, : n - 1] = np.minimum.accumulate(nxtslot[:, ::-1], axis=1)[:, ::-1]
    k = np.arange(1, n + 1, dtype=np.int64)[None, :]
    dest = prev + 1 + nxt - k
    # packet reversal is an involution, so gathering through dest == scatter
    return np.take_along_axis(state, dest - 1, axis=1)


def _step_circular_batch(state, bases, ctrs, p):
    B, n = state.shape
    f = np.empty((B, n), dtype=bool)
    todo = np.arange(B)
    while todo.size:
        u = _uniform_block(bases[todo], ctrs[todo], n)
        ctrs[todo] += _U(n)
        f[todo] = u < p
        todo = todo[~f[todo].any(axis=1)]
    slots = np.arange(1, n + 1, dtype=np.int64)
    cutslot = np.where(f, slots[None, :], 0)
    maxcut = cutslot.max(axis=1, keepdims=True)
    prevacc = np.zeros((B, n), dtype=np.int64)
    prevacc[:, 1:] = np.maximum.accumulate(cutslot, axis=1)[:, :-1]
    prev = np.where(prevacc > 0, prevacc, maxcut - n)
    nxtslot = np.where(f, slots[None, :], 2 * n)
    mincut = nxtslot.min(axis=1, keepdims=True)
    nxtacc = np.minimum.accumulate(nxtslot[:, ::-1], axis=1)[:, ::-1]
    nxt = np.where(nxtacc <= n, nxtacc, mincut + n)
    k = slots[None, :]
    dest = np.mod(prev + 1 + nxt - k - 1, n) + 1
    return np.take_along_axis(state, dest - 1, axis=1)


def _step_rudvalis_batch(state, heads, bases, ctrs):
    B, n = state.shape
    u = _draw_block(bases, ctrs, 1)[:, 0]
    ctrs += _U(1)
    coin = (u >> _U(63)).astype(np.int64)
    heads -= 1
    heads %= n
    rows = np.nonzero(coin)[0]
    if rows.size:
        a = heads[rows]
        b = (a + n - 1) % n
        tmp = state[rows, a].copy()
        state[rows, a] = state[rows, b]
        state[rows, b] = tmp
    return state


def _phi_batch(state, heads, cosv):
    B, n = state.shape
    if heads is None:
        return state.astype(np.float64) @ cosv
    idx = (heads[:, None] + np.arange(n, dtype=np.int64)[None, :]) % n
    return np.take_along_axis(state, idx, axis=1).astype(np.float64) @ cosv


def _normalized(state, heads):
    if heads is None:
        return state
    n = state.shape[1]
    idx = (heads[:, None] + np.arange(n, dtype=np.int64)[None, :]) % n
    return np.take_along_axis(state, idx, axis=1)


def _run(kind, n, p, tracked0, n_traj, seed, stream0, ts, record):
    """Shared trajectory driver; calls record(ti, state, heads) at each ts."""
    ts = np.asarray(ts, dtype=np.int64)
    if ts.size and (ts[0] < 0 or np.any(np.diff(ts) <= 0)):
        raise ValueError("record times must be strictly increasing and >= 0")
    bases = _stream_bases(seed, stream0, n_traj)
    ctrs = np.zeros(n_traj, dtype=_U)
    state = np.tile(np.asarray(tracked0, dtype=np.uint8), (n_traj, 1))
    heads = np.zeros(n_traj, dtype=np.int64) if kind == KIND_RUDVALIS else None
    ti = 0
    if ts.size and ts[0] == 0:
        record(0, state, heads)
        ti = 1
    t = 0
    while ti < ts.size:
        t += 1
        if kind == KIND_OVERHAND:
            state = _step_overhand_batch(state, bases, ctrs, p)
        elif kind == KIND_CIRCULAR:
            state = _step_circular_batch(state, bases, ctrs, p)
        else:
            state = _step_rudvalis_batch(state, heads, bases, ctrs)
        if t == ts[ti]:
            record(ti, state, heads)
            ti += 1


def simulate_phi(kind, n, p, tracked0, cosv, ts, n_traj, seed, stream0):
    """phi at the given (strictly increasing) record times, one stream per
    trajectory; returns (n_traj, len(ts)) float64."""
    cosv = np.asarray(cosv, dtype=np.float64)
    out = np.empty((n_traj, len(ts)), dtype=np.float64)

    def record(ti, state, heads):
        out[:, ti] = _phi_batch(state, heads, cosv)

    _run(kind, n, p, tracked0, n_traj, seed, stream0, ts, record)
    return out


def simulate_states(kind, n, p, tracked0, ts, n_traj, seed, stream0):
    """Tracked-occupancy flags (position order) at the record times;
    returns (n_traj, len(ts), n) uint8."""
    out = np.empty((n_traj, len(ts), n), dtype=np.uint8)

    def record(ti, state, heads):
        out[:, ti, :] = _normalized(state, heads)

    _run(kind, n, p, tracked0, n_traj, seed, stream0, ts, record)
    return out


def phi_second_moment(kind, n, p, tracked, cosv, block, n_draws, seed, stream0):
    """Mean of (phi(after block steps) - phi(now))^2 over n_draws independent
    one-block draws from the given state; one stream per draw."""
    cosv = np.asarray(cosv, dtype=np.float64)
    tracked = np.asarray(tracked, dtype=np.uint8)
    phi0 = float(tracked.astype(np.float64) @ cosv)
    bases = _stream_bases(seed, stream0, n_draws)
    ctrs = np.zeros(n_draws, dtype=_U)
    state = np.tile(tracked, (n_draws, 1))
    heads = np.zeros(n_draws, dtype=np.int64) if kind == KIND_RUDVALIS else None
    for _ in range(block):
        if kind == KIND_OVERHAND:
            state = _step_overhand_batch(state, bases, ctrs, p)
        elif kind == KIND_CIRCULAR:
            state = _step_circular_batch(state, bases, ctrs, p)
        else:
            state = _step_rudvalis_batch(state, heads, bases, ctrs)
    d = _phi_batch(state, heads, cosv) - phi0
    return float(np.mean(d * d))


def uniform_phi(n, tracked0, cosv, n_draws, seed, stream0):
    """phi of Fisher-Yates-uniform decks; one stream per draw, n-1 bounded
    draws each (u64 modulo)."""
    cosv = np.asarray(cosv, dtype=np.float64)
    bases = _stream_bases(seed, stream0, n_draws)
    state = np.tile(np.asarray(tracked0, dtype=np.uint8), (n_draws, 1))
    rows = np.arange(n_draws)
    for step, i in enumerate(range(n - 1, 0, -1)):
        u = _mix64(bases + _u64((step + 1) * 0x9E3779B97F4A7C15))
        j = (u % _U(i + 1)).astype(np.int64)
        tmp = state[rows, i].copy()
        state[rows, i] = state[rows, j]
        state[rows, j] = tmp
    return state.astype(np.float64) @ cosv
