"""Compiled numeric kernels (numba, cached, single-threaded).

Everything here is a plain function of arrays so it stays deterministic and
easy to test against dense references. Python-side validation lives in the
wrapper modules; kernels assume canonical inputs.
"""

import numpy as np
from numba import njit

# ---------------------------------------------------------------- matvecs


@njit(cache=True)
def csc_matvec(n_rows, indptr, indices, data, x):
    y = np.zeros(n_rows, np.float64)
    for j in range(x.size):
        xj = x[j]
        if xj != 0.0:
            for p in range(indptr[j], indptr[j + 1]):
                y[indices[p]] += data[p] * xj
    return y


@njit(cache=True)
def csc_rmatvec(n_cols, indptr, indices, data, x):
    y = np.zeros(n_cols, np.float64)
    for j in range(n_cols):
        s = 0.0
        for p in range(indptr[j], indptr[j + 1]):
            s += data[p] * x[indices[p]]
        y[j] = s
    return y


@njit(cache=True)
def sym_upper_matvec(n, indptr, indices, data, x):
    """y = M x where only the upper triangle of symmetric M is stored."""
    y = np.zeros(n, np.float64)
    for j in range(n):
        xj = x[j]
        for p in range(indptr[j], indptr[j + 1]):
            i = indices[p]
            v = data[p]
            y[i] += v * xj
            if i != j:
                y[j] += v * x[i]
    return y


# ---------------------------------------------------------------- LDL^T

# Up-looking LDL^T for symmetric quasi-definite matrices in upper CSC form,
# static pivot order, elimination-tree driven (the classic sparse approach).


@njit(cache=True)
def ldl_etree(n, Ap, Ai):
    """Elimination tree and per-column L fill counts.

    Returns (parent, Lnz, err): err is -2 when an entry below the diagonal
    is found (input must be upper triangular), else 0.
    """
    parent = np.full(n, -1, np.int64)
    flag = np.full(n, -1, np.int64)
    Lnz = np.zeros(n, np.int64)
    for k in range(n):
        flag[k] = k
        for p in range(Ap[k], Ap[k + 1]):
            i = Ai[p]
            if i > k:
                return parent, Lnz, -2
            while flag[i] != k:
                if parent[i] == -1:
                    parent[i] = k
                Lnz[i] += 1
                flag[i] = k
                i = parent[i]
    return parent, Lnz, 0


@njit(cache=True)
def ldl_numeric(n, Ap, Ai, Ax, parent, Lp, pivot_tol):
    """Numeric factorization P A P^T = (I + L) D (I + L)^T.

    L is returned in CSC form without the unit diagonal. Returns
    (Li, Lx, D, bad): bad is the pivot index whose |D| fell below
    ``pivot_tol``, or -1 on success.
    """
    Li = np.zeros(Lp[n], np.int64)
    Lx = np.zeros(Lp[n], np.float64)
    D = np.zeros(n, np.float64)
    fill = np.zeros(n, np.int64)  # next free slot per column of L
    y = np.zeros(n, np.float64)
    pattern = np.zeros(n, np.int64)
    path = np.zeros(n, np.int64)
    flag = np.full(n, -1, np.int64)
    for k in range(n):
        flag[k] = k
        n_pattern = 0
        diag = 0.0
        for p in range(Ap[k], Ap[k + 1]):
            i = Ai[p]
            if i == k:
                diag = Ax[p]
                continue
            y[i] = Ax[p]
            # climb the etree, collecting the new part of the path
            n_path = 0
            while flag[i] != k:
                path[n_path] = i
                n_path += 1
                flag[i] = k
                i = parent[i]
            # push deepest-last so reverse iteration is topological
            while n_path > 0:
                n_path -= 1
                pattern[n_pattern] = path[n_path]
                n_pattern += 1
        D[k] = diag
        for t in range(n_pattern - 1, -1, -1):
            j = pattern[t]
            yj = y[j]
            y[j] = 0.0
            p_end = Lp[j] + fill[j]
            for p in range(Lp[j], p_end):
                y[Li[p]] -= Lx[p] * yj
            ljk = yj / D[j]
            D[k] -= ljk * yj
            Li[p_end] = k
            Lx[p_end] = ljk
            fill[j] += 1
        if abs(D[k]) < pivot_tol:
            return Li, Lx, D, k
    return Li, Lx, D, -1


@njit(cache=True)
def ldl_solve_inplace(n, Lp, Li, Lx, D, x):
    """Solve (I+L) D (I+L)^T x = b in place (b passed in x, permuted)."""
    for j in range(n):
        xj = x[j]
        if xj != 0.0:
            for p in range(Lp[j], Lp[j + 1]):
                x[Li[p]] -= Lx[p] * xj
    for j in range(n):
        x[j] /= D[j]
    for j in range(n - 1, -1, -1):
        s = x[j]
        for p in range(Lp[j], Lp[j + 1]):
            s -= Lx[p] * x[Li[p]]
        x[j] = s


# ---------------------------------------------------------------- ordering


@njit(cache=True)
def mindeg_order(n, adj_ptr, adj_idx):
    """Exact minimum-degree ordering on an undirected graph.

    Ties break toward the lowest vertex index (the heap key is
    ``degree * n + vertex``, so pops are lexicographic). The elimination
    graph is kept as explicit neighbor lists in a pooled buffer that is
    compacted when it fills. Deterministic by construction.
    """
    cap = 4 * adj_idx.size + 4 * n + 64
    pool = np.empty(cap, np.int64)
    head = np.empty(n, np.int64)
    deg = np.empty(n, np.int64)
    top = 0
    for v in range(n):
        head[v] = top
        d = adj_ptr[v + 1] - adj_ptr[v]
        deg[v] = d
        for t in range(d):
            pool[top + t] = adj_idx[adj_ptr[v] + t]
        top += d

    alive = np.ones(n, np.bool_)
    mark = np.full(n, -1, np.int64)
    tag = 0

    hcap = 4 * n + 64
    heap = np.empty(hcap, np.int64)
    hsize = 0
    for v in range(n):
        heap[hsize] = deg[v] * n + v
        hsize += 1
        c = hsize - 1
        while c > 0:
            par = (c - 1) // 2
            if heap[par] > heap[c]:
                heap[par], heap[c] = heap[c], heap[par]
                c = par
            else:
                break

    perm = np.empty(n, np.int64)
    clique = np.empty(n, np.int64)

    for step in range(n):
        # pop the smallest valid (degree, vertex) key
        while True:
            if hsize == 0:
                # unreachable (every alive vertex keeps a valid key); guard
                # against an infinite loop by taking the lowest alive index
                v = -1
                for w in range(n):
                    if alive[w]:
                        v = w
                        break
                break
            key = heap[0]
            hsize -= 1
            heap[0] = heap[hsize]
            c = 0
            while True:
                l = 2 * c + 1
                r = l + 1
                smallest = c
                if l < hsize and heap[l] < heap[smallest]:
                    smallest = l
                if r < hsize and heap[r] < heap[smallest]:
                    smallest = r
                if smallest == c:
                    break
                heap[c], heap[smallest] = heap[smallest], heap[c]
                c = smallest
            d = key // n
            v = key - d * n
            if alive[v] and deg[v] == d:
                break
        perm[step] = v
        alive[v] = False
        dv = deg[v]
        for t in range(dv):
            clique[t] = pool[head[v] + t]

        # rebuild each clique member's list: (old \ {v}) U (clique \ {u})
        for iu in range(dv):
            u = clique[iu]
            need = deg[u] + dv
            if top + need > cap:
                # compact live lists into a fresh pool
                live = 0
                for w in range(n):
                    if alive[w]:
                        live += deg[w]
                newcap = 2 * (live + need) + 64
                if newcap < cap:
                    newcap = cap
                newpool = np.empty(newcap, np.int64)
                nt = 0
                for w in range(n):
                    if alive[w]:
                        h0 = head[w]
                        head[w] = nt
                        for t in range(deg[w]):
                            newpool[nt] = pool[h0 + t]
                            nt += 1
                pool = newpool
                cap = newcap
                top = nt
            tag += 1
            mark[u] = tag
            mark[v] = tag
            start = top
            for t in range(deg[u]):
                w = pool[head[u] + t]
                if mark[w] != tag:
                    mark[w] = tag
                    pool[top] = w
                    top += 1
            for t in range(dv):
                w = clique[t]
                if mark[w] != tag:
                    mark[w] = tag
                    pool[top] = w
                    top += 1
            head[u] = start
            deg[u] = top - start
            # push refreshed key
            if hsize == hcap:
                newheap = np.empty(2 * hcap + 64, np.int64)
                newheap[:hsize] = heap[:hsize]
                heap = newheap
                hcap = newheap.size
            heap[hsize] = deg[u] * n + u
            hsize += 1
            c = hsize - 1
            while c > 0:
                par = (c - 1) // 2
                if heap[par] > heap[c]:
                    heap[par], heap[c] = heap[c], heap[par]
                    c = par
                else:
                    break
    return perm


# ---------------------------------------------------------------- A^T A


@njit(cache=True)
def gram_upper_triplets(m, row_ptr, col_idx, values):
    """Upper-triangle triplets of A^T A from A in CSR form."""
    total = 0
    for r in range(m):
        k = row_ptr[r + 1] - row_ptr[r]
        total += k * (k + 1) // 2
    ti = np.empty(total, np.int64)
    tj = np.empty(total, np.int64)
    tv = np.empty(total, np.float64)
    t = 0
    for r in range(m):
        for a in range(row_ptr[r], row_ptr[r + 1]):
            ia = col_idx[a]
            va = values[a]
            for b in range(a, row_ptr[r + 1]):
                ti[t] = ia
                tj[t] = col_idx[b]
                tv[t] = va * values[b]
                t += 1
    return ti, tj, tv


# ---------------------------------------------------------------- kd-tree


@njit(cache=True)
def kd_query(pts, perm, axis, split, left, right, start, end, queries):
    """Exact nearest neighbor for each query row.

    Ties in distance go to the lowest point index: candidates are compared
    as (d^2, index) pairs, and a subtree is visited whenever its separating
    plane is at exactly the best distance, so an equal-distance lower index
    on the far side is never missed.
    """
    nq = queries.shape[0]
    out_i = np.empty(nq, np.int64)
    out_d = np.empty(nq, np.float64)
    snode = np.empty(128, np.int64)
    sdist = np.empty(128, np.float64)
    for q in range(nq):
        qx = queries[q, 0]
        qy = queries[q, 1]
        qz = queries[q, 2]
        best = np.inf
        besti = np.int64(9223372036854775807)
        snode[0] = 0
        sdist[0] = 0.0
        sp = 1
        while sp > 0:
            sp -= 1
            node = snode[sp]
            pd2 = sdist[sp]
            if pd2 > best:
                continue
            if left[node] < 0:
                for t in range(start[node], end[node]):
                    i = perm[t]
                    dx = pts[i, 0] - qx
                    dy = pts[i, 1] - qy
                    dz = pts[i, 2] - qz
                    d2 = dx * dx + dy * dy + dz * dz
                    if d2 < best or (d2 == best and i < besti):
                        best = d2
                        besti = i
            else:
                ax = axis[node]
                if ax == 0:
                    delta = qx - split[node]
                elif ax == 1:
                    delta = qy - split[node]
                else:
                    delta = qz - split[node]
                if delta < 0.0:
                    near = left[node]
                    far = right[node]
                else:
                    near = right[node]
                    far = left[node]
                snode[sp] = far
                sdist[sp] = delta * delta
                sp += 1
                snode[sp] = near
                sdist[sp] = pd2
                sp += 1
        out_i[q] = besti
        out_d[q] = np.sqrt(best)
    return out_i, out_d
