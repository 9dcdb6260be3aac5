"""Pure-Python implementations of the hot loops.

Same signatures and results as the compiled ``_kernels`` extension. Budgets
arrive pre-scaled to integers (see :mod:`ttsynth.kernels`), so Python's
unbounded ints keep everything exact.
"""

from bisect import bisect_left
from collections import deque

import numpy as np

OK, MISS, LEFTOVER = 0, 1, 2
PLAIN, BLC, MLLF = 0, 1, 2


def llf_run(C, T, D, cycle, reserved, budget0, itt, iidle, lm, q, mode):
    """Slot-by-slot LLF over ``[0, cycle)``.

    Returns ``(status, fail_slot, final_budget, slots)`` where ``slots[t]`` is
    the task index or -1 for an idle slot.
    """
    n = len(C)
    C = [int(x) for x in C]
    T = [int(x) for x in T]
    D = [int(x) for x in D]
    c = [0] * n
    d = [0] * n
    slots = np.full(cycle, -1, dtype=np.int32)
    b = budget0
    inf_lax = (cycle + 1) * q
    for t in range(cycle):
        for i in range(n):
            if c[i] > 0 and d[i] - t < c[i]:
                return MISS, t, b, slots
            if t % T[i] == 0:
                if c[i] > 0:
                    return MISS, t, b, slots
                c[i] = C[i]
                d[i] = t + D[i]
                if d[i] - t < c[i]:
                    return MISS, t, b, slots
        if reserved is not None and reserved[t] >= 0:
            slots[t] = reserved[t]
            continue
        best = -1
        best_lax = 0
        for i in range(n):
            if c[i] > 0:
                lax = d[i] - t - c[i]
                if best < 0 or lax < best_lax:
                    best, best_lax = i, lax
        run = best >= 0
        if mode == MLLF:
            if b < lm - iidle:
                idle_lax = (b // itt) * itt
            else:
                idle_lax = inf_lax
            if best < 0 or idle_lax < best_lax * q:
                run = False
        if run and mode != PLAIN and b < itt:
            run = False
        if run:
            slots[t] = best
            c[best] -= 1
            if mode != PLAIN:
                b -= itt
        elif mode != PLAIN:
            b = min(b + iidle, lm)
    for i in range(n):
        if c[i] > 0:
            return LEFTOVER, cycle, b, slots
    return OK, -1, b, slots


def et_offset(busy, C, T, prio, phi, cycle, window, horizon):
    """Fixed-priority ET service in the idle slots of a repeating table.

    Every ET task releases at ``phi`` and then every ``T[i]`` while the
    release lies before ``phi + window``. Returns ``(worst, unfinished,
    pending_1, pending_2)``: per-task worst response, whether work was left
    at ``phi + horizon``, and the outstanding work at ``phi + cycle`` and
    ``phi + 2 * cycle`` from jobs released before each point.
    """
    n = len(C)
    C = [int(x) for x in C]
    T = [int(x) for x in T]
    prio = [int(x) for x in prio]
    idle_pos = [k for k in range(cycle) if not busy[k]]
    m = len(idle_pos)

    def idle_before(x):
        return (x // cycle) * m + bisect_left(idle_pos, x % cycle)

    def kth_idle(j):
        return (j // m) * cycle + idle_pos[j % m]

    njobs = [-(-window // T[i]) for i in range(n)]
    released = [0] * n
    queues = [deque() for _ in range(n)]   # [release, remaining]
    worst = [0] * n
    end = phi + horizon
    checkpoints = [phi + cycle, phi + 2 * cycle]
    pending_at = [0, 0]
    t = phi

    def release_upto(now):
        for i in range(n):
            while released[i] < njobs[i] and phi + released[i] * T[i] <= now:
                queues[i].append([phi + released[i] * T[i], C[i]])
                released[i] += 1

    def next_release():
        nxt = None
        for i in range(n):
            if released[i] < njobs[i]:
                r = phi + released[i] * T[i]
                if nxt is None or r < nxt:
                    nxt = r
        return nxt

    while t < end:
        for k, cp in enumerate(checkpoints):
            if t == cp:
                pending_at[k] = sum(job[1] for qu in queues for job in qu)
        release_upto(t)
        best = -1
        for i in range(n):
            if queues[i]:
                if (best < 0 or prio[i] > prio[best]
                        or (prio[i] == prio[best] and queues[i][0][0] < queues[best][0][0])):
                    best = i
        nr = next_release()
        te = end
        if nr is not None:
            te = min(te, nr)
        for cp in checkpoints:
            if cp > t:
                te = min(te, cp)
        if best < 0:
            if nr is None:
                break
            t = te
            continue
        job = queues[best][0]
        base = idle_before(t)
        avail = idle_before(te) - base
        if job[1] <= avail:
            done = kth_idle(base + job[1] - 1) + 1
            worst[best] = max(worst[best], done - job[0])
            queues[best].popleft()
            t = done
        else:
            job[1] -= avail
            t = te
    unfinished = False
    for i in range(n):
        if queues[i]:
            unfinished = True
            worst[i] = max(worst[i], end - queues[i][0][0])
        if released[i] < njobs[i]:
            unfinished = True
    return worst, unfinished, pending_at[0], pending_at[1]


def et_sweep(busy, C, T, prio, cycle, window, horizon):
    """Run :func:`et_offset` for every phase in ``[0, cycle)``.

    Returns ``(worst, unbounded)``: an ``(cycle, n)`` array of per-phase worst
    responses and a per-phase flag for non-draining backlog.
    """
    n = len(C)
    worst = np.zeros((cycle, n), dtype=np.int64)
    unbounded = np.zeros(cycle, dtype=np.int8)
    for phi in range(cycle):
        w, unfinished, p1, p2 = et_offset(busy, C, T, prio, phi, cycle, window, horizon)
        worst[phi, :] = w
        unbounded[phi] = 1 if (unfinished and p2 > p1) else 0
    return worst, unbounded
