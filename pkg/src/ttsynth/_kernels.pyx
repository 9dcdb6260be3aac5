# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef long long i64

cdef enum:
    OK = 0
    MISS = 1
    LEFTOVER = 2
    PLAIN = 0
    MLLF = 2


cdef inline i64 floordiv(i64 a, i64 b) nogil:
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


def llf_run(C, T, D, Py_ssize_t cycle, reserved, i64 budget0, i64 itt,
            i64 iidle, i64 lm, i64 q, int mode):
    cdef i64[::1] cC = np.ascontiguousarray(C, dtype=np.int64)
    cdef i64[::1] cT = np.ascontiguousarray(T, dtype=np.int64)
    cdef i64[::1] cD = np.ascontiguousarray(D, dtype=np.int64)
    cdef Py_ssize_t n = cC.shape[0]
    cdef i64[::1] c = np.zeros(n, dtype=np.int64)
    cdef i64[::1] d = np.zeros(n, dtype=np.int64)
    slots_arr = np.full(cycle, -1, dtype=np.int32)
    cdef int[::1] slots = slots_arr
    cdef int[::1] res
    cdef bint has_res = reserved is not None
    if has_res:
        res = np.ascontiguousarray(reserved, dtype=np.int32)
    cdef i64 b = budget0
    cdef i64 inf_lax = (cycle + 1) * q
    cdef i64 lax, best_lax, idle_lax
    cdef Py_ssize_t t, i, best
    cdef bint run
    cdef int status = OK
    cdef Py_ssize_t fail = -1
    with nogil:
        for t in range(cycle):
            for i in range(n):
                if c[i] > 0 and d[i] - t < c[i]:
                    status = MISS
                    break
                if t % cT[i] == 0:
                    if c[i] > 0:
                        status = MISS
                        break
                    c[i] = cC[i]
                    d[i] = t + cD[i]
                    if d[i] - t < c[i]:
                        status = MISS
                        break
            if status != OK:
                fail = t
                break
            if has_res and res[t] >= 0:
                slots[t] = res[t]
                continue
            best = -1
            best_lax = 0
            for i in range(n):
                if c[i] > 0:
                    lax = d[i] - t - c[i]
                    if best < 0 or lax < best_lax:
                        best = i
                        best_lax = lax
            run = best >= 0
            if mode == MLLF:
                if b < lm - iidle:
                    idle_lax = floordiv(b, itt) * itt
                else:
                    idle_lax = inf_lax
                if best < 0 or idle_lax < best_lax * q:
                    run = False
            if run and mode != PLAIN and b < itt:
                run = False
            if run:
                slots[t] = <int>best
                c[best] -= 1
                if mode != PLAIN:
                    b -= itt
            elif mode != PLAIN:
                b = b + iidle
                if b > lm:
                    b = lm
        if status == OK:
            for i in range(n):
                if c[i] > 0:
                    status = LEFTOVER
                    fail = cycle
                    break
    return status, fail, b, slots_arr


cdef inline i64 idle_before(const i64* prefix, i64 m, i64 cycle, i64 x) nogil:
    return (x / cycle) * m + prefix[x % cycle]


cdef inline i64 kth_idle(const i64* pos, i64 m, i64 cycle, i64 j) nogil:
    return (j / m) * cycle + pos[j % m]


cdef void _et_offset(const i64* pos, const i64* prefix, i64 m, const i64* C,
                     const i64* T, const i64* prio, Py_ssize_t n, i64 phi,
                     i64 cycle, i64 window, i64 horizon, i64* worst, i64* njobs,
                     i64* head, i64* rel, i64* rem, int* unfinished,
                     i64* pend1, i64* pend2) nogil:
    # event driven: jump between releases, completions and checkpoints
    cdef Py_ssize_t i, best
    cdef i64 t = phi, end = phi + horizon, cp1 = phi + cycle, cp2 = phi + 2 * cycle
    cdef i64 nr, te, r, pend, bhead, ihead, base, avail, done
    for i in range(n):
        njobs[i] = (window + T[i] - 1) / T[i]
        head[i] = 0
        rel[i] = 0
        rem[i] = C[i]
        worst[i] = 0
    pend1[0] = 0
    pend2[0] = 0
    while t < end:
        # backlog of jobs released strictly before the checkpoint
        if t == cp1 or t == cp2:
            pend = 0
            for i in range(n):
                if head[i] < rel[i]:
                    pend += (rel[i] - head[i]) * C[i] - (C[i] - rem[i])
            if t == cp1:
                pend1[0] = pend
            else:
                pend2[0] = pend
        nr = -1
        for i in range(n):
            while rel[i] < njobs[i] and phi + rel[i] * T[i] <= t:
                rel[i] += 1
            if rel[i] < njobs[i]:
                r = phi + rel[i] * T[i]
                if nr < 0 or r < nr:
                    nr = r
        best = -1
        bhead = 0
        for i in range(n):
            if head[i] < rel[i]:
                ihead = phi + head[i] * T[i]
                if best < 0 or prio[i] > prio[best] or (prio[i] == prio[best] and ihead < bhead):
                    best = i
                    bhead = ihead
        te = end
        if nr >= 0 and nr < te:
            te = nr
        if cp1 > t and cp1 < te:
            te = cp1
        if cp2 > t and cp2 < te:
            te = cp2
        if best < 0:
            if nr < 0:
                break
            t = te
            continue
        base = idle_before(prefix, m, cycle, t)
        avail = idle_before(prefix, m, cycle, te) - base
        if rem[best] <= avail:
            done = kth_idle(pos, m, cycle, base + rem[best] - 1) + 1
            r = done - bhead
            if r > worst[best]:
                worst[best] = r
            head[best] += 1
            rem[best] = C[best]
            t = done
        else:
            rem[best] -= avail
            t = te
    unfinished[0] = 0
    for i in range(n):
        if head[i] < njobs[i]:
            unfinished[0] = 1
            if head[i] < rel[i]:
                r = end - (phi + head[i] * T[i])
                if r > worst[i]:
                    worst[i] = r


def _idle_index(busy, i64 cycle):
    b = np.ascontiguousarray(busy, dtype=np.int8).astype(bool)
    pos = np.flatnonzero(~b).astype(np.int64)
    prefix = np.zeros(cycle + 1, dtype=np.int64)
    prefix[1:] = np.cumsum(~b)
    if pos.shape[0] == 0:
        pos = np.zeros(1, dtype=np.int64)
        return pos, prefix, 0
    return pos, prefix, int((~b).sum())


def et_offset(busy, C, T, prio, i64 phi, i64 cycle, i64 window, i64 horizon):
    pos_arr, prefix_arr, m = _idle_index(busy, cycle)
    cdef i64[::1] pos = pos_arr
    cdef i64[::1] prefix = prefix_arr
    cdef i64[::1] cC = np.ascontiguousarray(C, dtype=np.int64)
    cdef i64[::1] cT = np.ascontiguousarray(T, dtype=np.int64)
    cdef i64[::1] cP = np.ascontiguousarray(prio, dtype=np.int64)
    cdef Py_ssize_t n = cC.shape[0]
    if n == 0:
        return [], False, 0, 0
    scratch = np.zeros((5, n), dtype=np.int64)
    cdef i64[:, ::1] s = scratch
    cdef int unfinished = 0
    cdef i64 p1 = 0, p2 = 0
    _et_offset(&pos[0], &prefix[0], m, &cC[0], &cT[0], &cP[0], n, phi, cycle,
               window, horizon, &s[0, 0], &s[1, 0], &s[2, 0], &s[3, 0], &s[4, 0],
               &unfinished, &p1, &p2)
    return [int(x) for x in scratch[0, :n]], bool(unfinished), p1, p2


def et_sweep(busy, C, T, prio, i64 cycle, i64 window, i64 horizon):
    pos_arr, prefix_arr, m_obj = _idle_index(busy, cycle)
    cdef i64 m = m_obj
    cdef i64[::1] pos = pos_arr
    cdef i64[::1] prefix = prefix_arr
    cdef i64[::1] cC = np.ascontiguousarray(C, dtype=np.int64)
    cdef i64[::1] cT = np.ascontiguousarray(T, dtype=np.int64)
    cdef i64[::1] cP = np.ascontiguousarray(prio, dtype=np.int64)
    cdef Py_ssize_t n = cC.shape[0]
    worst_arr = np.zeros((cycle, n), dtype=np.int64)
    unb_arr = np.zeros(cycle, dtype=np.int8)
    if n == 0:
        return worst_arr, unb_arr
    cdef i64[:, ::1] worst = worst_arr
    cdef signed char[::1] unb = unb_arr
    scratch = np.zeros((4, n), dtype=np.int64)
    cdef i64[:, ::1] s = scratch
    cdef int unfinished = 0
    cdef i64 p1 = 0, p2 = 0
    cdef i64 phi
    with nogil:
        for phi in range(cycle):
            _et_offset(&pos[0], &prefix[0], m, &cC[0], &cT[0], &cP[0], n, phi,
                       cycle, window, horizon, &worst[phi, 0], &s[0, 0], &s[1, 0],
                       &s[2, 0], &s[3, 0], &unfinished, &p1, &p2)
            unb[phi] = 1 if (unfinished and p2 > p1) else 0
    return worst_arr, unb_arr
