"""Pure numpy implementations of the hot kernels.

Semantics are shared with ``_ckernels.pyx`` line for line; see that module
for the argument conventions. Rule codes: 0 = M-rule, 1 = C-rule.
"""

from __future__ import annotations

import numpy as np

RULE_M = 0
RULE_C = 1


def pick_center(S, tie_tol):
    """Lowest index whose center sum is within ``tie_tol`` of the minimum."""
    lo = S.min()
    return int(np.flatnonzero(S <= lo + tie_tol)[0])


def sweep(D, mptr, midx, fwd, inv, order, rot, rule, p, act, wptr, widx, wval,
          pair_mode, S, state, eps, tie_tol,
          out_u, out_v, out_hu, out_hv, out_delta, out_epl, out_c):
    """One pass over ``order``; applies first-improving switches in place.

    ``state`` holds ``[epl, c_value, center]`` and is updated. Returns the
    number of accepted switches written to the ``out_*`` arrays.
    """
    accepted = 0
    actp = p[act] if not pair_mode else None
    for u in order:
        u = int(u)
        h = int(fwd[u])
        lo, hi = int(mptr[h]), int(mptr[h + 1])
        deg = hi - lo
        if deg == 0:
            continue
        start = int(rot[u]) % deg
        for j in range(deg):
            h2 = int(midx[lo + (start + j) % deg])
            v = int(inv[h2])
            pu, pv = p[u], p[v]
            if pu == 0.0 and pv == 0.0:
                continue
            if pair_mode:
                dm = 0.0
                a, b = int(wptr[u]), int(wptr[u + 1])
                for t in range(a, b):
                    w = widx[t]
                    if w != v:
                        hw = fwd[w]
                        dm += wval[t] * (D[h2, hw] - D[h, hw])
                a, b = int(wptr[v]), int(wptr[v + 1])
                for t in range(a, b):
                    w = widx[t]
                    if w != u:
                        hw = fwd[w]
                        dm += wval[t] * (D[h, hw] - D[h2, hw])
            else:
                hw = fwd[act]
                diff = D[h2, hw].astype(np.float64) - D[h, hw]
                mask = (act != u) & (act != v)
                dm = 2.0 * (pu - pv) * float(np.dot(actp[mask], diff[mask]))
            if rule == RULE_C:
                c = int(state[2])
                delta = (pu - pv) * (D[h2, c] - D[h, c])
            else:
                delta = dm
            if delta < -eps:
                fwd[u], fwd[v] = h2, h
                inv[h2], inv[h] = u, v
                state[0] += dm
                if not pair_mode:
                    S += (pu - pv) * (D[h2].astype(np.float64) - D[h])
                    c = pick_center(S, tie_tol)
                    state[1] = S[c]
                    state[2] = c
                out_u[accepted] = u
                out_v[accepted] = v
                out_hu[accepted] = h
                out_hv[accepted] = h2
                out_delta[accepted] = delta
                out_epl[accepted] = state[0]
                out_c[accepted] = state[1] if not pair_mode else np.nan
                accepted += 1
                break
    return accepted


def _first_min(x, tol=1e-12):
    return int(np.flatnonzero(x <= x.min() + tol)[0])


def _leaves(n, m, classes, first):
    """Canonical host tuples (lexicographic) whose first entry is ``first``."""
    rows = np.array([[first]], dtype=np.int64)
    for t in range(1, m):
        used = np.zeros((rows.shape[0], n), dtype=bool)
        np.put_along_axis(used, rows, True, axis=1)
        ok = ~used
        if classes[t] == classes[t - 1]:
            ok &= np.arange(n)[None, :] > rows[:, t - 1:t]
        r, h = np.nonzero(ok)
        rows = np.concatenate([rows[r], h[:, None]], axis=1)
        if rows.shape[0] == 0:
            break
    return rows


def enumerate_placements(D, W, pact, classes, mptr, midx, rule, compute_c,
                         check_local, eps, tie_tol):
    """Exhaustive search over canonical placements of ``m`` active processes.

    Returns ``(best_epl, best_assign, cmin, cmin_assign, count,
    lm_assign, lm_epl, lm_c)`` where the ``lm_*`` arrays list the leaves that
    pass the local-minimum test (empty unless ``check_local``).
    """
    n = D.shape[0]
    m = W.shape[0]
    Df = D.astype(np.float64)
    best_epl, best_assign = np.inf, None
    cmin, cmin_assign = np.inf, None
    count = 0
    lm_a, lm_e, lm_c = [], [], []
    deg = np.diff(mptr)
    maxdeg = int(deg.max()) if n else 0
    mpad = np.full((n, max(maxdeg, 1)), -1, dtype=np.int64)
    for h in range(n):
        mpad[h, :deg[h]] = midx[mptr[h]:mptr[h + 1]]

    for first in range(n):
        A = _leaves(n, m, classes, first)
        if A.shape[0] == 0 or A.shape[1] < m:
            continue
        N = A.shape[0]
        count += N
        epl = np.zeros(N)
        for t in range(1, m):
            for s in range(t):
                if W[s, t] != 0.0:
                    epl += W[s, t] * Df[A[:, s], A[:, t]]
        k = _first_min(epl)
        if epl[k] < best_epl - 1e-12:
            best_epl, best_assign = float(epl[k]), A[k].copy()

        Cval = np.full(N, np.nan)
        center = None
        if compute_c:
            S = np.zeros((N, n))
            for i in range(m):
                S += pact[i] * Df[A[:, i]]
            lo = S.min(axis=1, keepdims=True)
            center = np.argmax(S <= lo + tie_tol, axis=1)
            Cval = S[np.arange(N), center]
            k = _first_min(Cval)
            if Cval[k] < cmin - 1e-12:
                cmin, cmin_assign = float(Cval[k]), A[k].copy()

        if not check_local:
            continue
        rows = np.arange(N)
        occ = np.full((N, n), -1, dtype=np.int64)
        for i in range(m):
            occ[rows, A[:, i]] = i
        ok = np.ones(N, dtype=bool)
        for i in range(m):
            h = A[:, i]
            for slot in range(maxdeg):
                h2 = mpad[h, slot]
                valid = h2 >= 0
                h2c = np.where(valid, h2, 0)
                j = np.where(valid, occ[rows, h2c], -1)
                valid &= ~((j >= 0) & (j < i))
                if not valid.any():
                    continue
                if rule == RULE_C:
                    pj = np.where(j >= 0, pact[np.maximum(j, 0)], 0.0)
                    delta = (pact[i] - pj) * (Df[h2c, center] - Df[h, center])
                else:
                    delta = np.zeros(N)
                    for w in range(m):
                        hw = A[:, w]
                        if w != i and W[i, w] != 0.0:
                            delta += W[i, w] * (Df[h2c, hw] - Df[h, hw])
                    jj = np.maximum(j, 0)
                    has_j = j >= 0
                    # drop the i-j term from i's part: distance between them is unchanged
                    delta -= np.where(has_j, W[i, jj] * (0.0 - Df[h, h2c]), 0.0)
                    for w in range(m):
                        hw = A[:, w]
                        term = W[jj, w] * (Df[h, hw] - Df[h2c, hw])
                        delta += np.where(has_j & (jj != w) & (w != i), term, 0.0)
                ok &= ~(valid & (delta < -eps))
        idx = np.flatnonzero(ok)
        lm_a.append(A[idx])
        lm_e.append(epl[idx])
        lm_c.append(Cval[idx])

    if lm_a:
        lm_assign = np.concatenate(lm_a)
        lm_epl = np.concatenate(lm_e)
        lm_cv = np.concatenate(lm_c)
    else:
        lm_assign = np.zeros((0, m), dtype=np.int64)
        lm_epl = np.zeros(0)
        lm_cv = np.zeros(0)
    if best_assign is None:
        best_assign = np.zeros(m, dtype=np.int64)
    if cmin_assign is None:
        cmin_assign = np.zeros(m, dtype=np.int64)
        cmin = np.nan
    return best_epl, best_assign, cmin, cmin_assign, count, lm_assign, lm_epl, lm_cv
