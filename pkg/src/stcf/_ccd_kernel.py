"""Compiled inner loop for cyclic coordinate descent on truncated quadratics.

The per-coordinate problem is a 1-D sum of truncated quadratics; the
kernel rebuilds each term's slice coefficients from the current iterate,
sweeps the sorted interval endpoints exactly as the pure-Python solver
does, and writes the best piece minimizer back.  Insertion sort keeps the
event order deterministic without per-call allocation.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def ccd_cycles(x, sup_ptr, sup_idx, a_ptr, a_flat, b_flat, c_arr, lam_arr,
               coord_ptr, coord_term, coord_local,
               ev_pos, ev_da, ev_db, ev_dc, tol, max_iter):
    d = x.shape[0]
    touched = 0
    cycles = 0
    maxdiff = 0.0
    converged = False
    for it in range(max_iter):
        maxdiff = 0.0
        for j in range(d):
            p0 = coord_ptr[j]
            p1 = coord_ptr[j + 1]
            if p1 == p0:
                continue
            A0 = 0.0
            B0 = 0.0
            C0 = 0.0
            ne = 0
            ascale = 0.0
            for pos in range(p0, p1):
                t = coord_term[pos]
                lj = coord_local[pos]
                touched += 1
                s0 = sup_ptr[t]
                s = sup_ptr[t + 1] - s0
                base = a_ptr[t]
                arow = base + lj * s
                a = a_flat[arow + lj]
                ascale += abs(a)
                beff = b_flat[s0 + lj]
                ceff = c_arr[t]
                for k in range(s):
                    if k == lj:
                        continue
                    xk = x[sup_idx[s0 + k]]
                    beff += a_flat[arow + k] * xk
                    ceff += b_flat[s0 + k] * xk
                    row = base + k * s
                    rowsum = 0.0
                    for l in range(s):
                        if l != lj:
                            rowsum += a_flat[row + l] * x[sup_idx[s0 + l]]
                    ceff += 0.5 * rowsum * xk
                lam = lam_arr[t]
                if lam == np.inf:
                    A0 += a
                    B0 += beff
                    C0 += ceff
                else:
                    gc = ceff - lam
                    if a > 0.0:
                        disc = beff * beff - 2.0 * a * gc
                        if disc >= 0.0:
                            rt = np.sqrt(disc)
                            ev_pos[ne] = (-beff - rt) / a
                            ev_da[ne] = a
                            ev_db[ne] = beff
                            ev_dc[ne] = gc
                            ne += 1
                            ev_pos[ne] = (-beff + rt) / a
                            ev_da[ne] = -a
                            ev_db[ne] = -beff
                            ev_dc[ne] = -gc
                            ne += 1
                    elif gc <= 0.0:
                        C0 += gc
            for ii in range(1, ne):
                pp = ev_pos[ii]
                ea = ev_da[ii]
                eb = ev_db[ii]
                ec = ev_dc[ii]
                jj = ii - 1
                while jj >= 0 and ev_pos[jj] > pp:
                    ev_pos[jj + 1] = ev_pos[jj]
                    ev_da[jj + 1] = ev_da[jj]
                    ev_db[jj + 1] = ev_db[jj]
                    ev_dc[jj + 1] = ev_dc[jj]
                    jj -= 1
                ev_pos[jj + 1] = pp
                ev_da[jj + 1] = ea
                ev_db[jj + 1] = eb
                ev_dc[jj + 1] = ec
            atol = 1e-12 * (ascale + abs(A0) + 1e-300)
            xin = x[j]
            A = A0
            B = B0
            C = C0
            best_v = np.inf
            best_x = xin
            if A > atol:
                best_v = C - 0.5 * B * B / A
                best_x = -B / A
            elif abs(B) <= atol:
                best_v = C
            for e in range(ne):
                A += ev_da[e]
                B += ev_db[e]
                C += ev_dc[e]
                if A > atol:
                    v = C - 0.5 * B * B / A
                    if v < best_v:
                        best_v = v
                        best_x = -B / A
                elif abs(B) <= atol and C < best_v:
                    best_v = C
                    best_x = xin
            diff = abs(best_x - xin)
            if diff > maxdiff:
                maxdiff = diff
            x[j] = best_x
        cycles = it + 1
        if maxdiff < tol:
            converged = True
            break
    return cycles, maxdiff, touched, converged


@njit(cache=True)
def objective_terms(x, sup_ptr, sup_idx, a_ptr, a_flat, b_flat, c_arr, lam_arr,
                    active_out):
    total = 0.0
    T = c_arr.shape[0]
    for t in range(T):
        s0 = sup_ptr[t]
        s = sup_ptr[t + 1] - s0
        base = a_ptr[t]
        v = c_arr[t]
        for k in range(s):
            xk = x[sup_idx[s0 + k]]
            v += b_flat[s0 + k] * xk
            row = base + k * s
            rs = 0.0
            for l in range(s):
                rs += a_flat[row + l] * x[sup_idx[s0 + l]]
            v += 0.5 * rs * xk
        lam = lam_arr[t]
        if v <= lam:
            active_out[t] = True
            total += v
        else:
            active_out[t] = False
            total += lam
    return total
