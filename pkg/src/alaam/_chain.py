"""Compiled single-flip Metropolis kernel.

The chain runner mutates its y/z/rng-state buffers in place so Python-side
callers can interleave bookkeeping (sample retention, resynchronization,
parameter updates) between bursts of proposals. RNG is an explicit
xoshiro256++ state vector: thread-safe, seed-deterministic, and independent
of NumPy's global generators.

Dynamic-effect kernels assume the caller has set y[i] = 0 before evaluating
node i (the change-statistic convention); the runner does this itself.
"""

import numpy as np
from numba import njit, uint64

# dynamic effect codes used in compiled kernels; 0 = static
DYN_NONE = 0
DYN_CONTAGION = 1
DYN_CONTAGION_RECIP = 2
DYN_TRANS_T3 = 3
DYN_CYCLIC_C3 = 4
DYN_ALTER_IN2 = 5
DYN_ALTER_OUT2 = 6

DYN_CODES = {
    "Contagion": DYN_CONTAGION,
    "ContagionReciprocity": DYN_CONTAGION_RECIP,
    "TransitiveTriangleT3": DYN_TRANS_T3,
    "CyclicTriangleC3": DYN_CYCLIC_C3,
    "AlterInTwoStar2": DYN_ALTER_IN2,
    "AlterOutTwoStar2": DYN_ALTER_OUT2,
}


@njit(cache=True, nogil=True, inline="always")
def _rotl(x, k):
    return uint64((uint64(x) << uint64(k)) | (uint64(x) >> uint64(64 - k)))


def make_state(seed):
    """Seed an xoshiro256++ state; accepts any Python int."""
    return seed_state(int(seed) & 0x7FFFFFFFFFFFFFFF)


@njit(cache=True, nogil=True)
def seed_state(seed):
    """Expand a 64-bit seed into an xoshiro256++ state via splitmix64."""
    s = np.empty(4, dtype=np.uint64)
    z = uint64(seed)
    for i in range(4):
        z = uint64(z + uint64(0x9E3779B97F4A7C15))
        w = z
        w = uint64((w ^ (w >> uint64(30))) * uint64(0xBF58476D1CE4E5B9))
        w = uint64((w ^ (w >> uint64(27))) * uint64(0x94D049BB133111EB))
        s[i] = w ^ (w >> uint64(31))
    return s


@njit(cache=True, nogil=True, inline="always")
def _next_uniform(s):
    out = uint64(_rotl(uint64(s[0] + s[3]), 23) + s[0])
    t = uint64(s[1] << uint64(17))
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return (out >> uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, nogil=True, inline="always")
def _contains(indices, lo, hi, v):
    """Binary search for v in the sorted slice indices[lo:hi]."""
    while lo < hi:
        mid = (lo + hi) // 2
        x = indices[mid]
        if x == v:
            return True
        if x < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True, nogil=True)
def _dyn_delta(code, i, y, out_indptr, out_indices, in_indptr, in_indices,
               mut_indptr, mut_indices, directed):
    c = 0.0
    if code == DYN_CONTAGION:
        for p in range(out_indptr[i], out_indptr[i + 1]):
            c += y[out_indices[p]]
        if directed:
            for p in range(in_indptr[i], in_indptr[i + 1]):
                c += y[in_indices[p]]
    elif code == DYN_CONTAGION_RECIP:
        for p in range(mut_indptr[i], mut_indptr[i + 1]):
            c += y[mut_indices[p]]
    elif code == DYN_TRANS_T3:
        # i source: i->b, b->k, i->k
        for p in range(out_indptr[i], out_indptr[i + 1]):
            b = out_indices[p]
            if y[b]:
                for q in range(out_indptr[b], out_indptr[b + 1]):
                    k = out_indices[q]
                    if y[k] and _contains(out_indices, out_indptr[i], out_indptr[i + 1], k):
                        c += 1.0
        # i middle: a->i, i->k, a->k
        for p in range(in_indptr[i], in_indptr[i + 1]):
            a = in_indices[p]
            if y[a]:
                for q in range(out_indptr[i], out_indptr[i + 1]):
                    k = out_indices[q]
                    if y[k] and k != a and _contains(out_indices, out_indptr[a], out_indptr[a + 1], k):
                        c += 1.0
        # i sink: a->b, b->i, a->i
        for p in range(in_indptr[i], in_indptr[i + 1]):
            b = in_indices[p]
            if y[b]:
                for q in range(in_indptr[b], in_indptr[b + 1]):
                    a = in_indices[q]
                    if a != i and y[a] and _contains(in_indices, in_indptr[i], in_indptr[i + 1], a):
                        c += 1.0
    elif code == DYN_CYCLIC_C3:
        for p in range(out_indptr[i], out_indptr[i + 1]):
            j = out_indices[p]
            if y[j]:
                for q in range(out_indptr[j], out_indptr[j + 1]):
                    k = out_indices[q]
                    if y[k] and _contains(out_indices, out_indptr[k], out_indptr[k + 1], i):
                        c += 1.0
    elif code == DYN_ALTER_IN2:
        for p in range(out_indptr[i], out_indptr[i + 1]):
            v = out_indices[p]
            for q in range(in_indptr[v], in_indptr[v + 1]):
                k = in_indices[q]
                if k != i:
                    c += y[k]
    elif code == DYN_ALTER_OUT2:
        for p in range(in_indptr[i], in_indptr[i + 1]):
            v = in_indices[p]
            for q in range(out_indptr[v], out_indptr[v + 1]):
                k = out_indices[q]
                if k != i:
                    c += y[k]
    return c


@njit(cache=True, nogil=True)
def run_chain(state, y, z, theta, static_delta, dyn_kinds, free_nodes,
              out_indptr, out_indices, in_indptr, in_indices,
              mut_indptr, mut_indices, directed, n_steps):
    """Advance the chain by n_steps single-flip proposals.

    Mutates state, y and z in place; z tracks the statistics of the recorded
    effects incrementally. Returns the number of accepted flips.
    """
    kk = theta.size
    nf = free_nodes.size
    dbuf = np.empty(kk, dtype=np.float64)
    accepted = 0
    for _ in range(n_steps):
        f = int(_next_uniform(state) * nf)
        if f == nf:  # guard the u == 1.0-epsilon edge
            f = nf - 1
        i = free_nodes[f]
        s_old = y[i]
        y[i] = 0
        dot = 0.0
        for k in range(kk):
            code = dyn_kinds[k]
            if code == DYN_NONE:
                d = static_delta[i, k]
            else:
                d = _dyn_delta(code, i, y, out_indptr, out_indices,
                               in_indptr, in_indices, mut_indptr, mut_indices,
                               directed)
            dbuf[k] = d
            dot += theta[k] * d
        log_ratio = dot if s_old == 0 else -dot
        if log_ratio >= 0.0 or _next_uniform(state) < np.exp(log_ratio):
            accepted += 1
            if s_old == 0:
                y[i] = 1
                for k in range(kk):
                    z[k] += dbuf[k]
            else:
                for k in range(kk):
                    z[k] -= dbuf[k]
        else:
            y[i] = s_old
    return accepted
