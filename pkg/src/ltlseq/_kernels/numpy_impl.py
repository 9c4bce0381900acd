"""Pure-numpy kernels, used when numba is unavailable or disabled.

Vectorisation happens across the natural batch axis of each kernel (lassos,
product states); results match the compiled kernels exactly.
"""

import numpy as np


def lasso_accepts(delta, eps_ptr, eps_idx, accepting, words, prefix_len, initial):
    # A different algorithm from the compiled kernel, on purpose: every run
    # makes at most one jump, so acceptance reduces to "does the letter-only
    # run from some jump point hit an accepting state on its eventual cycle".
    n_words, L = words.shape
    n = delta.shape[0]
    c = L - prefix_len
    nxt = np.arange(1, L + 1)
    nxt[-1] = prefix_len
    rows = np.arange(n_words)

    eps_mat = np.zeros((n, n), dtype=bool)
    for q in range(n):
        eps_mat[q, eps_idx[eps_ptr[q]:eps_ptr[q + 1]]] = True

    # good[w, q, p]: letter-only run from (q, p) is Büchi-accepting
    state = np.broadcast_to(np.arange(n)[None, :, None], (n_words, n, L)).copy()
    pos = np.arange(L)
    good = np.zeros((n_words, n, L), dtype=bool)
    warm, window = n * L, n * c
    for step in range(warm + window):
        if step >= warm:
            good |= accepting[state]
        letters = words[:, pos]
        state = delta[state, letters[:, None, :]]
        pos = nxt[pos]

    q = np.full(n_words, initial, dtype=np.int64)
    p = 0
    ok = good[rows, q, p].copy()
    for _ in range(n * L + 1):
        targets = eps_mat[q]                     # (n_words, n)
        ok |= (targets & good[rows, :, p]).any(axis=1)
        q = delta[q, words[:, p]]
        p = nxt[p]
    return ok


def _tables(next_sq, labels, stage_next, stage_reward):
    lab = labels[next_sq]                        # (S, A)
    return stage_next[:, lab], stage_reward[:, lab]  # (K, S, A)


def value_iteration(next_sq, labels, stage_next, stage_reward, eps_next,
                    eps_reward, terminal, gamma, tol, max_iter):
    K = stage_next.shape[0]
    S = next_sq.shape[0]
    nk, rew = _tables(next_sq, labels, stage_next, stage_reward)
    has_eps = eps_next >= 0
    en = np.where(has_eps, eps_next, 0)
    live = ~terminal
    V = np.zeros((K, S))
    residual = np.inf
    it = 0
    while it < max_iter:
        it += 1
        best = (rew + gamma * V[nk, next_sq[None, :, :]]).max(axis=2)
        eps_val = eps_reward[:, None] + gamma * V[en]
        best = np.where(has_eps[:, None], np.maximum(best, eps_val), best)
        W = np.where(live[:, None], best, 0.0)
        residual = float(np.abs(W - V).max()) if K else 0.0
        V = W
        if residual < tol:
            break
    return V, it, residual


def q_episode(Q, next_sq, labels, stage_next, stage_reward, terminal, start,
              explore, random_action, epsilon, alpha, gamma, horizon, n_actions):
    s, k = int(start), 0
    ret, disc, last = 0.0, 1.0, 0.0
    t = 0
    while t < horizon:
        if explore[t] < epsilon:
            a = int(random_action[t])
        else:
            a = int(np.argmax(Q[k, s, :n_actions]))
        ns = next_sq[s, a]
        lab = labels[ns]
        k2 = stage_next[k, lab]
        r = stage_reward[k, lab]
        target = r if terminal[k2] else r + gamma * Q[k2, ns, :n_actions].max()
        Q[k, s, a] += alpha * (target - Q[k, s, a])
        ret += disc * r
        if r != 0.0:
            last = r
        disc *= gamma
        s, k = int(ns), int(k2)
        t += 1
        if terminal[k]:
            break
    return ret, t, last
