# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels: one dynamics sweep and exhaustive placement enumeration.

Array conventions (shared with ``_pykernels``):

* ``D``: (n, n) int32 host distance matrix.
* ``mptr``/``midx``: CSR move sets per host, ascending.
* ``fwd``/``inv``: process -> host and host -> process, int64, mutated in place.
* ``p``: activities (product mode) or marginals (pair mode), per process.
* ``act``: ids of processes with positive activity.
* ``wptr``/``widx``/``wval``: CSR symmetric pair weights (pair mode only).
* ``S``: per-host center sums, sum_w p_w D[fwd[w], x] (product mode).
* ``state``: ``[epl, c_value, center]``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport NAN
from libcpp.vector cimport vector

cnp.import_array()

ctypedef cnp.int64_t i64

cdef enum:
    RULE_M = 0
    RULE_C = 1


cdef inline Py_ssize_t _pick_center(double[::1] S, double tie_tol) noexcept nogil:
    cdef Py_ssize_t x, n = S.shape[0]
    cdef double lo = S[0]
    for x in range(1, n):
        if S[x] < lo:
            lo = S[x]
    for x in range(n):
        if S[x] <= lo + tie_tol:
            return x
    return 0


def pick_center(double[::1] S, double tie_tol):
    return _pick_center(S, tie_tol)


def sweep(const int[:, ::1] D, const i64[::1] mptr, const i64[::1] midx,
          i64[::1] fwd, i64[::1] inv,
          const i64[::1] order, const i64[::1] rot, int rule,
          const double[::1] p, const i64[::1] act,
          const i64[::1] wptr, const i64[::1] widx, const double[::1] wval,
          bint pair_mode, double[::1] S, double[::1] state, double eps, double tie_tol,
          i64[::1] out_u, i64[::1] out_v, i64[::1] out_hu,
          i64[::1] out_hv, double[::1] out_delta, double[::1] out_epl,
          double[::1] out_c):
    cdef Py_ssize_t oi, j, t, x, deg, start, lo, hi
    cdef Py_ssize_t nh = D.shape[0], na = act.shape[0]
    cdef i64 u, v, w, h, h2, hw, c
    cdef double pu, pv, dm, acc, delta, coef
    cdef Py_ssize_t accepted = 0
    with nogil:
        for oi in range(order.shape[0]):
            u = order[oi]
            h = fwd[u]
            lo = mptr[h]
            hi = mptr[h + 1]
            deg = hi - lo
            if deg == 0:
                continue
            start = rot[u] % deg
            for j in range(deg):
                h2 = midx[lo + (start + j) % deg]
                v = inv[h2]
                pu = p[u]
                pv = p[v]
                if pu == 0.0 and pv == 0.0:
                    continue
                if pair_mode:
                    dm = 0.0
                    for t in range(wptr[u], wptr[u + 1]):
                        w = widx[t]
                        if w != v:
                            hw = fwd[w]
                            dm += wval[t] * (D[h2, hw] - D[h, hw])
                    for t in range(wptr[v], wptr[v + 1]):
                        w = widx[t]
                        if w != u:
                            hw = fwd[w]
                            dm += wval[t] * (D[h, hw] - D[h2, hw])
                else:
                    acc = 0.0
                    for t in range(na):
                        w = act[t]
                        if w != u and w != v:
                            hw = fwd[w]
                            acc += p[w] * (D[h2, hw] - D[h, hw])
                    dm = 2.0 * (pu - pv) * acc
                if rule == RULE_C:
                    c = <i64>state[2]
                    delta = (pu - pv) * (D[h2, c] - D[h, c])
                else:
                    delta = dm
                if delta < -eps:
                    fwd[u] = h2
                    fwd[v] = h
                    inv[h2] = u
                    inv[h] = v
                    state[0] += dm
                    if not pair_mode:
                        coef = pu - pv
                        for x in range(nh):
                            S[x] += coef * (D[h2, x] - D[h, x])
                        c = _pick_center(S, tie_tol)
                        state[1] = S[c]
                        state[2] = c
                    out_u[accepted] = u
                    out_v[accepted] = v
                    out_hu[accepted] = h
                    out_hv[accepted] = h2
                    out_delta[accepted] = delta
                    out_epl[accepted] = state[0]
                    if pair_mode:
                        out_c[accepted] = NAN
                    else:
                        out_c[accepted] = state[1]
                    accepted += 1
                    break
    return accepted


cdef struct Ctx:
    int n
    int m
    int rule
    bint compute_c
    bint check_local
    double eps
    double tie_tol


cdef class _Enum:
    cdef const int[:, ::1] D
    cdef const double[:, ::1] W
    cdef const double[::1] pact
    cdef const i64[::1] classes
    cdef const i64[::1] mptr
    cdef const i64[::1] midx
    cdef Ctx ctx
    cdef i64[::1] hs
    cdef i64[::1] occ
    cdef double[::1] cost
    cdef double[::1] S
    cdef double best_epl
    cdef double cmin
    cdef i64[::1] best_assign
    cdef i64[::1] cmin_assign
    cdef i64 count
    cdef vector[i64] lm_assign
    cdef vector[double] lm_epl
    cdef vector[double] lm_c

    def __init__(self, D, W, pact, classes, mptr, midx, int rule, bint compute_c,
                 bint check_local, double eps, double tie_tol):
        self.D = D
        self.W = W
        self.pact = pact
        self.classes = classes
        self.mptr = mptr
        self.midx = midx
        self.ctx.n = D.shape[0]
        self.ctx.m = W.shape[0]
        self.ctx.rule = rule
        self.ctx.compute_c = compute_c
        self.ctx.check_local = check_local
        self.ctx.eps = eps
        self.ctx.tie_tol = tie_tol
        self.hs = np.zeros(max(self.ctx.m, 1), dtype=np.int64)
        self.occ = np.full(self.ctx.n, -1, dtype=np.int64)
        self.cost = np.zeros(self.ctx.m + 1)
        self.S = np.zeros(self.ctx.n)
        self.best_epl = np.inf
        self.cmin = np.inf
        self.best_assign = np.zeros(max(self.ctx.m, 1), dtype=np.int64)
        self.cmin_assign = np.zeros(max(self.ctx.m, 1), dtype=np.int64)
        self.count = 0

    cdef void _dfs(self, int t) noexcept nogil:
        cdef int n = self.ctx.n, m = self.ctx.m
        cdef i64 h, lo
        cdef int s
        cdef double add
        if t == m:
            self._leaf()
            return
        lo = 0
        if t > 0 and self.classes[t] == self.classes[t - 1]:
            lo = self.hs[t - 1] + 1
        for h in range(lo, n):
            if self.occ[h] >= 0:
                continue
            add = 0.0
            for s in range(t):
                add += self.W[s, t] * self.D[self.hs[s], h]
            self.hs[t] = h
            self.occ[h] = t
            self.cost[t + 1] = self.cost[t] + add
            self._dfs(t + 1)
            self.occ[h] = -1

    cdef void _leaf(self) noexcept nogil:
        cdef int n = self.ctx.n, m = self.ctx.m
        cdef int i, w, x
        cdef i64 center = 0
        cdef double epl = self.cost[m]
        cdef double cval = 0.0, acc, lo
        cdef bint local = True
        self.count += 1
        if epl < self.best_epl - 1e-12:
            self.best_epl = epl
            for i in range(m):
                self.best_assign[i] = self.hs[i]
        if self.ctx.compute_c:
            for x in range(n):
                acc = 0.0
                for i in range(m):
                    acc += self.pact[i] * self.D[self.hs[i], x]
                self.S[x] = acc
            center = _pick_center(self.S, self.ctx.tie_tol)
            cval = self.S[center]
            if cval < self.cmin - 1e-12:
                self.cmin = cval
                for i in range(m):
                    self.cmin_assign[i] = self.hs[i]
        else:
            cval = NAN
        if not self.ctx.check_local:
            return
        local = self._is_local(center)
        if local:
            for i in range(m):
                self.lm_assign.push_back(self.hs[i])
            self.lm_epl.push_back(epl)
            self.lm_c.push_back(cval)

    cdef bint _is_local(self, i64 center) noexcept nogil:
        cdef int m = self.ctx.m
        cdef int i, w
        cdef i64 h, h2, j, t, hw
        cdef double delta, pj
        for i in range(m):
            h = self.hs[i]
            for t in range(self.mptr[h], self.mptr[h + 1]):
                h2 = self.midx[t]
                j = self.occ[h2]
                if j >= 0 and j < i:
                    continue
                if self.ctx.rule == RULE_C:
                    pj = self.pact[j] if j >= 0 else 0.0
                    delta = (self.pact[i] - pj) * (self.D[h2, center] - self.D[h, center])
                else:
                    delta = 0.0
                    for w in range(m):
                        if w == i or w == j:
                            continue
                        hw = self.hs[w]
                        delta += self.W[i, w] * (self.D[h2, hw] - self.D[h, hw])
                        if j >= 0:
                            delta += self.W[j, w] * (self.D[h, hw] - self.D[h2, hw])
                if delta < -self.ctx.eps:
                    return False
        return True

    def run(self):
        with nogil:
            self._dfs(0)
        m = self.ctx.m
        k = self.lm_epl.size()
        lm_assign = np.empty((k, m), dtype=np.int64)
        lm_epl = np.empty(k)
        lm_c = np.empty(k)
        cdef Py_ssize_t r, i
        for r in range(k):
            lm_epl[r] = self.lm_epl[r]
            lm_c[r] = self.lm_c[r]
            for i in range(m):
                lm_assign[r, i] = self.lm_assign[r * m + i]
        cmin = self.cmin if self.ctx.compute_c else np.nan
        return (self.best_epl, np.asarray(self.best_assign)[:m].copy(), cmin,
                np.asarray(self.cmin_assign)[:m].copy(), self.count, lm_assign, lm_epl, lm_c)


def enumerate_placements(D, W, pact, classes, mptr, midx, int rule, bint compute_c,
                         bint check_local, double eps, double tie_tol):
    return _Enum(D, W, pact, classes, mptr, midx, rule, compute_c,
                 check_local, eps, tie_tol).run()
