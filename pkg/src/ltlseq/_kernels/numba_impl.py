"""Compiled kernels.  Signatures mirror :mod:`ltlseq._kernels.numpy_impl`."""

import numpy as np
from numba import njit

_opts = dict(cache=True, nogil=True)


@njit(**_opts)
def _product_succ(q, pos, word, delta, eps_ptr, eps_idx, nxt, L, out):
    """Write the successors of product node (q, pos) into ``out``; return count."""
    n = 0
    out[n] = delta[q, word[pos]] * L + nxt[pos]
    n += 1
    for e in range(eps_ptr[q], eps_ptr[q + 1]):
        out[n] = eps_idx[e] * L + pos
        n += 1
    return n


@njit(**_opts)
def lasso_accepts(delta, eps_ptr, eps_idx, accepting, words, prefix_len, initial):
    n_words, L = words.shape
    n_states = delta.shape[0]
    V = n_states * L
    nxt = np.empty(L, dtype=np.int64)
    for i in range(L - 1):
        nxt[i] = i + 1
    nxt[L - 1] = prefix_len
    max_deg = 1
    for q in range(n_states):
        d = 1 + eps_ptr[q + 1] - eps_ptr[q]
        if d > max_deg:
            max_deg = d
    out = np.zeros(n_words, dtype=np.bool_)
    reach = np.zeros(V, dtype=np.bool_)
    seen = np.zeros(V, dtype=np.bool_)
    stack = np.empty(V, dtype=np.int64)
    succ = np.empty(max_deg, dtype=np.int64)
    for w in range(n_words):
        word = words[w]
        reach[:] = False
        top = 0
        start = initial * L
        reach[start] = True
        stack[top] = start
        top += 1
        while top > 0:
            top -= 1
            v = stack[top]
            k = _product_succ(v // L, v % L, word, delta, eps_ptr, eps_idx, nxt, L, succ)
            for i in range(k):
                u = succ[i]
                if not reach[u]:
                    reach[u] = True
                    stack[top] = u
                    top += 1
        found = False
        for a in range(V):
            if found:
                break
            if not reach[a] or not accepting[a // L]:
                continue
            # is a on a cycle?
            seen[:] = False
            top = 0
            k = _product_succ(a // L, a % L, word, delta, eps_ptr, eps_idx, nxt, L, succ)
            for i in range(k):
                u = succ[i]
                if not seen[u]:
                    seen[u] = True
                    stack[top] = u
                    top += 1
            while top > 0 and not seen[a]:
                top -= 1
                v = stack[top]
                k = _product_succ(v // L, v % L, word, delta, eps_ptr, eps_idx, nxt, L, succ)
                for i in range(k):
                    u = succ[i]
                    if not seen[u]:
                        seen[u] = True
                        stack[top] = u
                        top += 1
            found = seen[a]
        out[w] = found
    return out


@njit(**_opts)
def value_iteration(next_sq, labels, stage_next, stage_reward, eps_next,
                    eps_reward, terminal, gamma, tol, max_iter):
    K = stage_next.shape[0]
    S, A = next_sq.shape
    V = np.zeros((K, S))
    W = np.zeros((K, S))
    residual = np.inf
    it = 0
    while it < max_iter:
        it += 1
        residual = 0.0
        for k in range(K):
            if terminal[k]:
                continue
            for s in range(S):
                best = -np.inf
                for a in range(A):
                    ns = next_sq[s, a]
                    lab = labels[ns]
                    v = stage_reward[k, lab] + gamma * V[stage_next[k, lab], ns]
                    if v > best:
                        best = v
                if eps_next[k] >= 0:
                    v = eps_reward[k] + gamma * V[eps_next[k], s]
                    if v > best:
                        best = v
                W[k, s] = best
                d = abs(best - V[k, s])
                if d > residual:
                    residual = d
        V, W = W, V
        if residual < tol:
            break
    return V, it, residual


@njit(**_opts)
def q_episode(Q, next_sq, labels, stage_next, stage_reward, terminal, start,
              explore, random_action, epsilon, alpha, gamma, horizon, n_actions):
    s = start
    k = 0
    ret = 0.0
    disc = 1.0
    last = 0.0
    t = 0
    while t < horizon:
        if explore[t] < epsilon:
            a = random_action[t]
        else:
            a = 0
            for b in range(1, n_actions):
                if Q[k, s, b] > Q[k, s, a]:
                    a = b
        ns = next_sq[s, a]
        lab = labels[ns]
        k2 = stage_next[k, lab]
        r = stage_reward[k, lab]
        target = r
        if not terminal[k2]:
            best = Q[k2, ns, 0]
            for b in range(1, n_actions):
                if Q[k2, ns, b] > best:
                    best = Q[k2, ns, b]
            target += gamma * best
        Q[k, s, a] += alpha * (target - Q[k, s, a])
        ret += disc * r
        if r != 0.0:
            last = r
        disc *= gamma
        s = ns
        k = k2
        t += 1
        if terminal[k]:
            break
    return ret, t, last
