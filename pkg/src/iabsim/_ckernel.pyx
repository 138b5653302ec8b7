# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulation kernel. Line-for-line twin of iabsim._kernel.run; any
semantic change there must land here too. Bit-identical traces are enforced by
tests and the benchmark.

Error flags in scalars[7]: 1 = buffer cap breach under the guard policy,
2 = ring overflow (sizing bug; should be unreachable)."""

import numpy as np


def run_kernel(int T, int N, int L, int F, int P, int donor,
               unsigned char[::1] capped,
               int[::1] coff, int[::1] cadj,
               int[::1] flow_src, int[::1] period,
               int[::1] pf, int[::1] fp_off,
               int[::1] pn_off, int[::1] pn_flat,
               int[::1] pl_off, int[::1] pl_flat,
               int[::1] qbase, int n_queues, int[::1] rcap_q,
               long long[::1] soff, int[::1] ts_buf,
               int burst_enabled, int burst_slot, int burst_size,
               double gamma, int cap,
               double p_block, double p_recover, double p_steady,
               int policy, int overflow, int genie, int max_c,
               double[:, ::1] draws,
               int[:, ::1] age_tr, int[:, ::1] occ_tr,
               long long[::1] totq_tr, long long[::1] gen_tr,
               long long[::1] arr_tr, long long[::1] drop_tr,
               int[::1] ovf_tr, int[::1] act_tr, int[::1] fail_tr,
               long long[::1] gen_distinct, long long[::1] dlv_distinct,
               long long[::1] scalars):
    cdef unsigned char[::1] blocked = np.zeros(L, dtype=np.uint8)
    cdef int[::1] mark = np.full(L, -1, dtype=np.int32)
    cdef int[::1] head = np.zeros(max(n_queues, 1), dtype=np.int32)
    cdef int[::1] qlen = np.zeros(max(n_queues, 1), dtype=np.int32)
    cdef int[:, ::1] q_nf = np.zeros((N, F), dtype=np.int32)
    cdef int[::1] occ = np.zeros(N, dtype=np.int32)
    cdef long long[:, ::1] freshest = np.zeros((N, F), dtype=np.int64)
    cdef unsigned char[:, ::1] arrived = np.zeros((F, T + 2), dtype=np.uint8)

    cdef int sz = max(max_c, 1)
    cdef double[::1] cw = np.zeros(sz, dtype=np.float64)
    cdef int[::1] cl = np.zeros(sz, dtype=np.int32)
    cdef int[::1] cf = np.zeros(sz, dtype=np.int32)
    cdef int[::1] cps = np.zeros(sz, dtype=np.int32)
    cdef int[::1] chp = np.zeros(sz, dtype=np.int32)
    cdef int[::1] sel = np.zeros(sz, dtype=np.int32)
    cdef int[::1] mf = np.zeros(sz, dtype=np.int32)
    cdef int[::1] mps = np.zeros(sz, dtype=np.int32)
    cdef int[::1] mh = np.zeros(sz, dtype=np.int32)
    cdef int[::1] mstamp = np.zeros(sz, dtype=np.int32)

    cdef long long generated_instances = 0, arrived_instances = 0, dropped = 0
    cdef long long dedup = 0, overflow_events = 0, failed = 0, in_queue = 0
    cdef long long aged
    cdef int t, f, n, l, ps, h, i, j, q, a, b, src, n_new, pos, stamp
    cdef int nc, nm, chosen_count, admitted, base_n, base_l, hops
    cdef int kl, kf, kps, khp
    cdef double u, w, kw

    for l in range(L):
        blocked[l] = 1 if draws[0, l] < p_steady else 0

    for t in range(1, T + 1):
        # 1. record slot-start state
        for f in range(F):
            age_tr[t, f] = <int> (t - freshest[donor, f])
        for n in range(N):
            occ_tr[t, n] = occ[n]
        totq_tr[t] = in_queue
        gen_tr[t] = generated_instances
        arr_tr[t] = arrived_instances
        drop_tr[t] = dropped

        # 2. traffic generation
        for f in range(F):
            n_new = 1 if t % period[f] == 0 else 0
            if burst_enabled == 1 and t == burst_slot:
                n_new += burst_size
            if n_new == 0:
                continue
            src = flow_src[f]
            freshest[src, f] = t
            gen_distinct[f] += 1
            for ps in range(fp_off[f], fp_off[f + 1]):
                q = qbase[ps]
                for a in range(n_new):
                    if qlen[q] >= rcap_q[q]:
                        scalars[7] = 2; scalars[8] = q; scalars[9] = t
                        return
                    pos = (head[q] + qlen[q]) % rcap_q[q]
                    ts_buf[soff[q] + pos] = t
                    qlen[q] += 1
                q_nf[src, f] += n_new
                occ[src] += n_new
                in_queue += n_new
                generated_instances += n_new

        # 3. channel step
        for l in range(L):
            u = draws[t, l]
            if blocked[l] == 1:
                blocked[l] = 1 if u >= p_recover else 0
            else:
                blocked[l] = 1 if u < p_block else 0

        # 4. candidates + greedy selection
        nc = 0
        for ps in range(P):
            f = pf[ps]
            aged = t - freshest[donor, f]
            base_n = pn_off[ps]
            base_l = pl_off[ps]
            hops = pl_off[ps + 1] - base_l
            for h in range(hops):
                q = qbase[ps] + h
                if qlen[q] == 0:
                    continue
                l = pl_flat[base_l + h]
                if genie == 1 and blocked[l] == 1:
                    continue
                i = pn_flat[base_n + h]
                j = pn_flat[base_n + h + 1]
                if policy == 0 and capped[j] == 1 and occ[j] >= cap:
                    continue
                if policy == 0:
                    w = gamma * <double> (q_nf[i, f] - q_nf[j, f]) + <double> aged
                elif policy == 1:
                    w = gamma * <double> (q_nf[i, f] - q_nf[j, f])
                else:
                    w = <double> aged
                if w > 0.0:
                    cw[nc] = w; cl[nc] = l; cf[nc] = f; cps[nc] = ps; chp[nc] = h
                    nc += 1

        # insertion sort: weight desc, then link id, then flow id (total order)
        for a in range(1, nc):
            kw = cw[a]; kl = cl[a]; kf = cf[a]; kps = cps[a]; khp = chp[a]
            b = a - 1
            while b >= 0 and (cw[b] < kw or (cw[b] == kw and
                    (cl[b] > kl or (cl[b] == kl and cf[b] > kf)))):
                cw[b + 1] = cw[b]; cl[b + 1] = cl[b]; cf[b + 1] = cf[b]
                cps[b + 1] = cps[b]; chp[b + 1] = chp[b]
                b -= 1
            cw[b + 1] = kw; cl[b + 1] = kl; cf[b + 1] = kf
            cps[b + 1] = kps; chp[b + 1] = khp

        chosen_count = 0
        for a in range(nc):
            l = cl[a]
            if mark[l] == t:
                continue
            sel[chosen_count] = a
            chosen_count += 1
            mark[l] = t
            for b in range(coff[l], coff[l + 1]):
                mark[cadj[b]] = t
        act_tr[t] = chosen_count

        # 5a. departures
        nm = 0
        for a in range(chosen_count):
            b = sel[a]
            l = cl[b]
            if genie == 0 and blocked[l] == 1:
                failed += 1
                fail_tr[t] += 1
                continue
            ps = cps[b]; h = chp[b]; f = cf[b]
            q = qbase[ps] + h
            stamp = ts_buf[soff[q] + head[q]]
            head[q] = (head[q] + 1) % rcap_q[q]
            qlen[q] -= 1
            i = pn_flat[pn_off[ps] + h]
            q_nf[i, f] -= 1
            occ[i] -= 1
            in_queue -= 1
            mstamp[nm] = stamp; mf[nm] = f; mps[nm] = ps; mh[nm] = h
            nm += 1

        # 5b. arrivals
        for a in range(nm):
            f = mf[a]; ps = mps[a]; h = mh[a]; stamp = mstamp[a]
            j = pn_flat[pn_off[ps] + h + 1]
            if j == donor:
                arrived_instances += 1
                if arrived[f, stamp] == 0:
                    arrived[f, stamp] = 1
                    dlv_distinct[f] += 1
                if stamp > freshest[donor, f]:
                    freshest[donor, f] = stamp
                else:
                    dedup += 1
            else:
                admitted = 1
                if capped[j] == 1 and occ[j] >= cap:
                    if overflow == 0:
                        scalars[7] = 1; scalars[8] = j; scalars[9] = t
                        return
                    overflow_events += 1
                    ovf_tr[t] += 1
                    if overflow == 1:
                        dropped += 1
                        admitted = 0
                if admitted == 1:
                    q = qbase[ps] + h + 1
                    if qlen[q] >= rcap_q[q]:
                        scalars[7] = 2; scalars[8] = q; scalars[9] = t
                        return
                    pos = (head[q] + qlen[q]) % rcap_q[q]
                    ts_buf[soff[q] + pos] = stamp
                    qlen[q] += 1
                    q_nf[j, f] += 1
                    occ[j] += 1
                    in_queue += 1
                    if stamp > freshest[j, f]:
                        freshest[j, f] = stamp

    # final snapshot after the last slot's arrivals
    for f in range(F):
        age_tr[T + 1, f] = <int> (T + 1 - freshest[donor, f])
    for n in range(N):
        occ_tr[T + 1, n] = occ[n]
    totq_tr[T + 1] = in_queue
    gen_tr[T + 1] = generated_instances
    arr_tr[T + 1] = arrived_instances
    drop_tr[T + 1] = dropped

    scalars[0] = generated_instances
    scalars[1] = arrived_instances
    scalars[2] = dropped
    scalars[3] = dedup
    scalars[4] = overflow_events
    scalars[5] = failed
    scalars[6] = in_queue
