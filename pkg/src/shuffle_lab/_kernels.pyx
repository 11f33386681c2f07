# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory kernels (hot loops only).

Stream/consumption contract and function signatures match
``shuffle_lab._kernels_py``; see ``shuffle_lab.backend``.
"""

from libc.stdint cimport int64_t, uint8_t, uint64_t

import numpy as np

COMPILED = True

KIND_OVERHAND = 0
KIND_CIRCULAR = 1
KIND_RUDVALIS = 2

cdef uint64_t GOLDEN = (<uint64_t>0x9E3779B9u << 32) | <uint64_t>0x7F4A7C15u
cdef uint64_t M1 = (<uint64_t>0xBF58476Du << 32) | <uint64_t>0x1CE4E5B9u
cdef uint64_t M2 = (<uint64_t>0x94D049BBu << 32) | <uint64_t>0x133111EBu
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z ^= z >> 30
    z *= M1
    z ^= z >> 27
    z *= M2
    z ^= z >> 31
    return z


cdef inline uint64_t stream_base_c(uint64_t seed, uint64_t stream) noexcept nogil:
    return mix64(mix64(seed) + GOLDEN * stream)


cdef inline uint64_t draw(uint64_t base, uint64_t ctr) noexcept nogil:
    return mix64(base + (ctr + 1) * GOLDEN)


cdef inline double u01(uint64_t u) noexcept nogil:
    return <double>(u >> 11) * INV53


def stream_u64(seed, stream, offset, count):
    """Raw draws offset..offset+count-1 of one stream (contract test hook)."""
    cdef uint64_t base = stream_base_c(<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF),
                                       <uint64_t>(stream & 0xFFFFFFFFFFFFFFFF))
    cdef uint64_t off = <uint64_t>(offset & 0xFFFFFFFFFFFFFFFF)
    out = np.empty(count, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef Py_ssize_t i
    for i in range(count):
        o[i] = draw(base, off + <uint64_t>i)
    return out


cdef inline void rev_seg(uint8_t* occ, int i, int j) noexcept nogil:
    cdef uint8_t tmp
    while i < j:
        tmp = occ[i]
        occ[i] = occ[j]
        occ[j] = tmp
        i += 1
        j -= 1


cdef uint64_t step_overhand(uint8_t* occ, int n, double p,
                            uint64_t base, uint64_t ctr) noexcept nogil:
    cdef int start = 0, s
    cdef uint64_t u
    for s in range(n - 1):
        u = draw(base, ctr)
        ctr += 1
        if u01(u) < p:
            rev_seg(occ, start, s)
            start = s + 1
    rev_seg(occ, start, n - 1)
    return ctr


cdef uint64_t step_circular(uint8_t* occ, uint8_t* flags, int n, double p,
                            uint64_t base, uint64_t ctr) noexcept nogil:
    cdef int ncuts, s, c0, prev, nxt, i, j
    cdef uint64_t u
    cdef uint8_t tmp
    while True:
        ncuts = 0
        for s in range(n):
            u = draw(base, ctr)
            ctr += 1
            flags[s] = 1 if u01(u) < p else 0
            ncuts += flags[s]
        if ncuts > 0:
            break
    c0 = 0
    while flags[c0] == 0:
        c0 += 1
    prev = c0
    while True:
        nxt = prev + 1
        while nxt < n and flags[nxt] == 0:
            nxt += 1
        if nxt >= n:
            nxt = c0 + n  # wrap: last arc ends at the first cut
        i = prev + 1
        j = nxt
        while i < j:
            tmp = occ[i % n]
            occ[i % n] = occ[j % n]
            occ[j % n] = tmp
            i += 1
            j -= 1
        if nxt >= n:
            break
        prev = nxt
    return ctr


cdef uint64_t step_rudvalis(uint8_t* buf, int* head, int n,
                            uint64_t base, uint64_t ctr) noexcept nogil:
    cdef uint64_t u = draw(base, ctr)
    cdef int h = head[0] - 1
    cdef int b
    cdef uint8_t tmp
    ctr += 1
    if h < 0:
        h += n
    if u >> 63:  # coin 1: the card above the bottom goes to the top
        b = h + n - 1
        if b >= n:
            b -= n
        tmp = buf[h]
        buf[h] = buf[b]
        buf[b] = tmp
    head[0] = h
    return ctr


cdef double phi_of(uint8_t* buf, int head, int n, double* cosv) noexcept nogil:
    cdef double acc = 0.0
    cdef int k, idx
    for k in range(n):
        idx = head + k
        if idx >= n:
            idx -= n
        if buf[idx]:
            acc += cosv[k]
    return acc


def simulate_phi(int kind, int n, double p, tracked0, cosv, ts,
                 Py_ssize_t n_traj, seed, stream0):
    """phi at the given (strictly increasing) record times, one stream per
    trajectory; returns (n_traj, len(ts)) float64."""
    ts_arr = np.asarray(ts, dtype=np.int64)
    if ts_arr.size and (ts_arr[0] < 0 or np.any(np.diff(ts_arr) <= 0)):
        raise ValueError("record times must be strictly increasing and >= 0")
    cdef int64_t[::1] tv = ts_arr
    cdef Py_ssize_t R = ts_arr.size
    out = np.empty((n_traj, R), dtype=np.float64)
    cdef double[:, ::1] o = out
    cos_arr = np.ascontiguousarray(cosv, dtype=np.float64)
    cdef double[::1] cv = cos_arr
    tr_arr = np.ascontiguousarray(tracked0, dtype=np.uint8)
    cdef uint8_t[::1] tr = tr_arr
    work_arr = np.empty(n, dtype=np.uint8)
    flags_arr = np.empty(n, dtype=np.uint8)
    cdef uint8_t[::1] work = work_arr
    cdef uint8_t[::1] flags = flags_arr
    cdef uint64_t sd = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t s0 = <uint64_t>(stream0 & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t base, ctr
    cdef Py_ssize_t j, ti
    cdef int64_t t
    cdef int head, k
    with nogil:
        for j in range(n_traj):
            base = stream_base_c(sd, s0 + <uint64_t>j)
            ctr = 0
            head = 0
            for k in range(n):
                work[k] = tr[k]
            ti = 0
            if R > 0 and tv[0] == 0:
                o[j, 0] = phi_of(&work[0], head, n, &cv[0])
                ti = 1
            t = 0
            while ti < R:
                t += 1
                if kind == 0:
                    ctr = step_overhand(&work[0], n, p, base, ctr)
                elif kind == 1:
                    ctr = step_circular(&work[0], &flags[0], n, p, base, ctr)
                else:
                    ctr = step_rudvalis(&work[0], &head, n, base, ctr)
                if t == tv[ti]:
                    o[j, ti] = phi_of(&work[0], head, n, &cv[0])
                    ti += 1
    return out


def simulate_states(int kind, int n, double p, tracked0, ts,
                    Py_ssize_t n_traj, seed, stream0):
    """Tracked-occupancy flags (position order) at the record times;
    returns (n_traj, len(ts), n) uint8."""
    ts_arr = np.asarray(ts, dtype=np.int64)
    if ts_arr.size and (ts_arr[0] < 0 or np.any(np.diff(ts_arr) <= 0)):
        raise ValueError("record times must be strictly increasing and >= 0")
    cdef int64_t[::1] tv = ts_arr
    cdef Py_ssize_t R = ts_arr.size
    out = np.empty((n_traj, R, n), dtype=np.uint8)
    cdef uint8_t[:, :, ::1] o = out
    tr_arr = np.ascontiguousarray(tracked0, dtype=np.uint8)
    cdef uint8_t[::1] tr = tr_arr
    work_arr = np.empty(n, dtype=np.uint8)
    flags_arr = np.empty(n, dtype=np.uint8)
    cdef uint8_t[::1] work = work_arr
    cdef uint8_t[::1] flags = flags_arr
    cdef uint64_t sd = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t s0 = <uint64_t>(stream0 & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t base, ctr
    cdef Py_ssize_t j, ti
    cdef int64_t t
    cdef int head, k, idx
    with nogil:
        for j in range(n_traj):
            base = stream_base_c(sd, s0 + <uint64_t>j)
            ctr = 0
            head = 0
            for k in range(n):
                work[k] = tr[k]
            ti = 0
            if R > 0 and tv[0] == 0:
                for k in range(n):
                    o[j, 0, k] = work[k]
                ti = 1
            t = 0
            while ti < R:
                t += 1
                if kind == 0:
                    ctr = step_overhand(&work[0], n, p, base, ctr)
                elif kind == 1:
                    ctr = step_circular(&work[0], &flags[0], n, p, base, ctr)
                else:
                    ctr = step_rudvalis(&work[0], &head, n, base, ctr)
                if t == tv[ti]:
                    for k in range(n):
                        idx = head + k
                        if idx >= n:
                            idx -= n
                        o[j, ti, k] = work[idx]
                    ti += 1
    return out


def phi_second_moment(int kind, int n, double p, tracked, cosv, int block,
                      Py_ssize_t n_draws, seed, stream0):
    """Mean of (phi(after block steps) - phi(now))^2 over n_draws independent
    one-block draws from the given state; one stream per draw."""
    cos_arr = np.ascontiguousarray(cosv, dtype=np.float64)
    cdef double[::1] cv = cos_arr
    tr_arr = np.ascontiguousarray(tracked, dtype=np.uint8)
    cdef uint8_t[::1] tr = tr_arr
    work_arr = np.empty(n, dtype=np.uint8)
    flags_arr = np.empty(n, dtype=np.uint8)
    cdef uint8_t[::1] work = work_arr
    cdef uint8_t[::1] flags = flags_arr
    cdef uint64_t sd = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t s0 = <uint64_t>(stream0 & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t base, ctr
    cdef Py_ssize_t d
    cdef int head, k, b
    cdef double phi0, dphi, acc = 0.0
    with nogil:
        phi0 = phi_of(&tr[0], 0, n, &cv[0])
        for d in range(n_draws):
            base = stream_base_c(sd, s0 + <uint64_t>d)
            ctr = 0
            head = 0
            for k in range(n):
                work[k] = tr[k]
            for b in range(block):
                if kind == 0:
                    ctr = step_overhand(&work[0], n, p, base, ctr)
                elif kind == 1:
                    ctr = step_circular(&work[0], &flags[0], n, p, base, ctr)
                else:
                    ctr = step_rudvalis(&work[0], &head, n, base, ctr)
            dphi = phi_of(&work[0], head, n, &cv[0]) - phi0
            acc += dphi * dphi
    return acc / <double>n_draws


def uniform_phi(int n, tracked0, cosv, Py_ssize_t n_draws, seed, stream0):
    """phi of Fisher-Yates-uniform decks; one stream per draw, n-1 bounded
    draws each (u64 modulo)."""
    cos_arr = np.ascontiguousarray(cosv, dtype=np.float64)
    cdef double[::1] cv = cos_arr
    tr_arr = np.ascontiguousarray(tracked0, dtype=np.uint8)
    cdef uint8_t[::1] tr = tr_arr
    out = np.empty(n_draws, dtype=np.float64)
    cdef double[::1] o = out
    work_arr = np.empty(n, dtype=np.uint8)
    cdef uint8_t[::1] work = work_arr
    cdef uint64_t sd = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t s0 = <uint64_t>(stream0 & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t base, u
    cdef Py_ssize_t d
    cdef int i, j, k
    cdef uint8_t tmp
    cdef uint64_t ctr
    with nogil:
        for d in range(n_draws):
            base = stream_base_c(sd, s0 + <uint64_t>d)
            ctr = 0
            for k in range(n):
                work[k] = tr[k]
            for i in range(n - 1, 0, -1):
                u = draw(base, ctr)
                ctr += 1
                j = <int>(u % <uint64_t>(i + 1))
                tmp = work[i]
                work[i] = work[j]
                work[j] = tmp
            o[d] = phi_of(&work[0], 0, n, &cv[0])
    return out
