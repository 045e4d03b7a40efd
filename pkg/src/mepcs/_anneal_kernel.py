"""Compiled inner loop of the annealer.

State is passed as arrays and mutated in place so a run can be split into
chunks of sweeps. Random draws are generated by the caller.
"""

import math

import numba
import numpy as np

LMEP = 0
AMEP = 1


@numba.njit(cache=True, inline="always")
def _xlogx(c):
    return c * math.log2(c) if c > 0 else 0.0


@numba.njit(cache=True)
def block_sums(counts, size):
    """(sum c log c over blocks, sum c log c over contexts)."""
    s_block = 0.0
    s_ctx = 0.0
    n_ctx = counts.size // size
    for c in range(n_ctx):
        tot = 0
        for j in range(size):
            cnt = counts[c * size + j]
            s_block += _xlogx(cnt)
            tot += cnt
        s_ctx += _xlogx(tot)
    return s_block, s_ctx


@numba.njit(cache=True)
def structure_value(mode, counts, wflat, size, n_windows):
    if mode == AMEP:
        acc = 0.0
        for c in range(counts.size):
            if counts[c] > 0:
                acc += wflat[c] * counts[c]
        return acc / n_windows
    s_block, s_ctx = block_sums(counts, size)
    return (s_ctx - s_block) / n_windows


@numba.njit(cache=True)
def fill_counts(idx, order, size, n_windows, counts):
    counts[:] = 0
    for s in range(n_windows):
        code = 0
        for t in range(order):
            code = code * size + idx[s + t]
        counts[code] += 1


@numba.njit(cache=True)
def fill_residual(idx, values, At, y, r):
    m = y.size
    for j in range(m):
        r[j] = -y[j]
    for i in range(idx.size):
        v = values[idx[i]]
        if v != 0.0:
            for j in range(m):
                r[j] += v * At[i, j]


@numba.njit(cache=True)
def run_chunk(mode, idx, counts, r, best_idx, scalars, values, At, col_sq, y, wflat,
              order, size, n_windows, scale, temps, coords, proposals, uniforms,
              trace, move_log, log_moves):
    """Anneal ``temps.size`` sweeps of ``idx.size`` proposals each.

    ``scalars`` holds [current cost, best cost, accepted-move log length].
    ``trace`` rows receive (temperature, current, best, accepted) per sweep.
    """
    n = idx.size
    m = y.size
    powers = np.empty(order, dtype=np.int64)
    p = 1
    for t in range(order - 1, -1, -1):
        powers[t] = p
        p *= size
    old_codes = np.empty(order, dtype=np.int64)
    new_codes = np.empty(order, dtype=np.int64)

    cur = scalars[0]
    best = scalars[1]
    n_logged = int(scalars[2])
    structure = structure_value(mode, counts, wflat, size, n_windows)
    s_block, s_ctx = block_sums(counts, size)
    k_prop = 0
    for sweep in range(temps.size):
        T = temps[sweep]
        accepted = 0
        for _ in range(n):
            i = coords[k_prop]
            v = proposals[k_prop]
            u = uniforms[k_prop]
            k_prop += 1
            old = idx[i]
            if v == old:
                continue
            # windows touching coordinate i
            s_lo = i - order + 1
            if s_lo < 0:
                s_lo = 0
            s_hi = i
            if s_hi > n_windows - 1:
                s_hi = n_windows - 1
            n_aff = 0
            for s in range(s_lo, s_hi + 1):
                code = 0
                for t in range(order):
                    code = code * size + idx[s + t]
                old_codes[n_aff] = code
                new_codes[n_aff] = code + (v - old) * powers[i - s]
                n_aff += 1

            if mode == AMEP:
                d_struct = 0.0
                for a in range(n_aff):
                    d_struct += wflat[new_codes[a]] - wflat[old_codes[a]]
                d_struct /= n_windows
                nb = s_block
                nc = s_ctx
            else:
                nb = s_block
                nc = s_ctx
                for a in range(n_aff):
                    c = old_codes[a]
                    ctx = c // size
                    tot = 0
                    for j in range(size):
                        tot += counts[ctx * size + j]
                    nb += _xlogx(counts[c] - 1) - _xlogx(counts[c])
                    nc += _xlogx(tot - 1) - _xlogx(tot)
                    counts[c] -= 1
                    c = new_codes[a]
                    ctx = c // size
                    tot = 0
                    for j in range(size):
                        tot += counts[ctx * size + j]
                    nb += _xlogx(counts[c] + 1) - _xlogx(counts[c])
                    nc += _xlogx(tot + 1) - _xlogx(tot)
                    counts[c] += 1
                d_struct = (nc - nb) / n_windows - structure

            dv = values[v] - values[old]
            dot = 0.0
            for j in range(m):
                dot += r[j] * At[i, j]
            d_res = scale * (2.0 * dv * dot + dv * dv * col_sq[i])
            delta = d_struct + d_res

            if delta <= 0.0 or (T > 0.0 and u < math.exp(-delta / T)):
                idx[i] = v
                for j in range(m):
                    r[j] += dv * At[i, j]
                if mode == AMEP:
                    for a in range(n_aff):
                        counts[old_codes[a]] -= 1
                        counts[new_codes[a]] += 1
                    structure += d_struct
                else:
                    s_block = nb
                    s_ctx = nc
                    structure = (nc - nb) / n_windows
                cur += delta
                accepted += 1
                if log_moves and n_logged < move_log.shape[0]:
                    move_log[n_logged, 0] = k_prop - 1
                    move_log[n_logged, 1] = i
                    move_log[n_logged, 2] = v
                    move_log[n_logged, 3] = cur
                    n_logged += 1
                if cur < best:
                    best = cur
                    best_idx[:] = idx
            elif mode == LMEP:
                for a in range(n_aff - 1, -1, -1):
                    counts[new_codes[a]] -= 1
                    counts[old_codes[a]] += 1

        # resynchronize against drift from incremental updates
        fill_residual(idx, values, At, y, r)
        structure = structure_value(mode, counts, wflat, size, n_windows)
        s_block, s_ctx = block_sums(counts, size)
        rr = 0.0
        for j in range(m):
            rr += r[j] * r[j]
        cur = structure + scale * rr
        if cur < best:
            best = cur
            best_idx[:] = idx
        trace[sweep, 0] = T
        trace[sweep, 1] = cur
        trace[sweep, 2] = best
        trace[sweep, 3] = accepted

    scalars[0] = cur
    scalars[1] = best
    scalars[2] = n_logged
