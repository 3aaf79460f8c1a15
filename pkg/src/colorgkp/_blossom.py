"""Exact maximum-weight matching core (blossom algorithm), numba-compiled.

Array-only formulation of the classic O(n^3) primal-dual blossom method
(Galil's variant with per-blossom least-slack edge lists) so that the
per-trial decoder matchings run at compiled speed.  The layout follows the
well-known endpoint representation: edge k has half-edges 2k and 2k+1, and
``mate`` stores the remote half-edge of the matched edge at each vertex.

All mutable state lives in flat numpy arrays sized against ``2n`` blossom
slots; recursion is replaced by explicit stacks so the whole core compiles
under ``@njit``.  Setting NUMBA_DISABLE_JIT=1 runs the same code as plain
Python, which is how it was debugged.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _endpoint(p, eu, ev):
    if (p & 1) == 0:
        return eu[p >> 1]
    return ev[p >> 1]


@njit(cache=True, inline="always")
def _slack(k, eu, ev, ew, dualvar):
    return dualvar[eu[k]] + dualvar[ev[k]] - 2.0 * ew[k]


@njit(cache=True)
def _blossom_leaves(b, n, childs, childs_cnt, stack, out):
    """Collect the vertices inside blossom b into `out`; returns the count."""
    ns = 0
    no = 0
    stack[ns] = b
    ns += 1
    while ns > 0:
        ns -= 1
        x = stack[ns]
        if x < n:
            out[no] = x
            no += 1
        else:
            # push children reversed so they pop in child order
            for i in range(childs_cnt[x] - 1, -1, -1):
                stack[ns] = childs[x, i]
                ns += 1
    return no


@njit(cache=True)
def _assign_label(w0, t0, p0, n, eu, ev, mate, label, labelend, bestedge,
                  inblossom, blossombase, childs, childs_cnt, queue, qn,
                  lv_stack, lv_out):
    w = w0
    t = t0
    p = p0
    while True:
        b = inblossom[w]
        label[w] = t
        label[b] = t
        labelend[w] = p
        labelend[b] = p
        bestedge[w] = -1
        bestedge[b] = -1
        if t == 1:
            # S-blossom: schedule all its vertices for scanning
            cnt = _blossom_leaves(b, n, childs, childs_cnt, lv_stack, lv_out)
            for i in range(cnt):
                queue[qn[0]] = lv_out[i]
                qn[0] += 1
            return
        # T-blossom: its base's mate becomes an S-vertex
        base = blossombase[b]
        mp = mate[base]
        w = _endpoint(mp, eu, ev)
        t = 1
        p = mp ^ 1


@njit(cache=True)
def _scan_blossom(v0, w0, eu, ev, label, labelend, inblossom, blossombase,
                  path):
    """Trace back from v and w to find a common tree ancestor base (or -1)."""
    pn = 0
    base = -1
    v = v0
    w = w0
    while v != -1 or w != -1:
        b = inblossom[v]
        if (label[b] & 4) != 0:
            base = blossombase[b]
            break
        path[pn] = b
        pn += 1
        label[b] = 5
        if labelend[b] == -1:
            v = -1
        else:
            v = _endpoint(labelend[b], eu, ev)
            b = inblossom[v]
            v = _endpoint(labelend[b], eu, ev)
        if w != -1:
            tmp = v
            v = w
            w = tmp
    for i in range(pn):
        label[path[i]] = 1
    return base


@njit(cache=True)
def _add_blossom(base, k, n, eu, ev, ew, dualvar, mate, label, labelend,
                 bestedge, inblossom, blossomparent, blossombase,
                 childs, childs_cnt, endps, endps_cnt,
                 bbe, bbe_cnt, nbe_flat, nbe_off,
                 unused, un, queue, qn, lv_stack, lv_out, bet):
    v = eu[k]
    w = ev[k]
    bb = inblossom[base]
    bv = inblossom[v]
    bw = inblossom[w]
    un[0] -= 1
    b = unused[un[0]]
    blossombase[b] = base
    blossomparent[b] = -1
    blossomparent[bb] = b

    # v-side path up to the common base (collected forward, reversed below)
    cn = 0
    while bv != bb:
        blossomparent[bv] = b
        childs[b, cn] = bv
        endps[b, cn] = labelend[bv]
        cn += 1
        v = _endpoint(labelend[bv], eu, ev)
        bv = inblossom[v]
    childs[b, cn] = bb
    cn += 1
    # reverse childs[0:cn] and endps[0:cn-1], then append edge k itself
    for i in range(cn // 2):
        t1 = childs[b, i]
        childs[b, i] = childs[b, cn - 1 - i]
        childs[b, cn - 1 - i] = t1
    en = cn - 1
    for i in range(en // 2):
        t1 = endps[b, i]
        endps[b, i] = endps[b, en - 1 - i]
        endps[b, en - 1 - i] = t1
    endps[b, en] = 2 * k
    en += 1
    # w-side path
    while bw != bb:
        blossomparent[bw] = b
        childs[b, cn] = bw
        cn += 1
        endps[b, en] = labelend[bw] ^ 1
        en += 1
        w = _endpoint(labelend[bw], eu, ev)
        bw = inblossom[w]
    childs_cnt[b] = cn
    endps_cnt[b] = en

    label[b] = 1
    labelend[b] = labelend[bb]
    dualvar[b] = 0.0

    lcnt = _blossom_leaves(b, n, childs, childs_cnt, lv_stack, lv_out)
    for i in range(lcnt):
        lv = lv_out[i]
        if label[inblossom[lv]] == 2:
            # former T-vertex becomes S inside the new blossom
            queue[qn[0]] = lv
            qn[0] += 1
        inblossom[lv] = b

    # merge least-slack edge lists of the children
    for i in range(2 * n):
        bet[i] = -1
    for ci in range(cn):
        bc = childs[b, ci]
        if bbe_cnt[bc] < 0:
            # no cached list: walk all edges of this child's vertices
            ccnt = _blossom_leaves(bc, n, childs, childs_cnt, lv_stack, lv_out)
            for li in range(ccnt):
                x = lv_out[li]
                for idx in range(nbe_off[x], nbe_off[x + 1]):
                    ke = nbe_flat[idx] >> 1
                    j = ev[ke] if inblossom[ev[ke]] != b else eu[ke]
                    bj = inblossom[j]
                    if (bj != b and label[bj] == 1 and
                            (bet[bj] == -1 or
                             _slack(ke, eu, ev, ew, dualvar) <
                             _slack(bet[bj], eu, ev, ew, dualvar))):
                        bet[bj] = ke
        else:
            for li in range(bbe_cnt[bc]):
                ke = bbe[bc, li]
                j = ev[ke] if inblossom[ev[ke]] != b else eu[ke]
                bj = inblossom[j]
                if (bj != b and label[bj] == 1 and
                        (bet[bj] == -1 or
                         _slack(ke, eu, ev, ew, dualvar) <
                         _slack(bet[bj], eu, ev, ew, dualvar))):
                    bet[bj] = ke
        bbe_cnt[bc] = -1
        bestedge[bc] = -1
    nb = 0
    for i in range(2 * n):
        if bet[i] != -1:
            bbe[b, nb] = bet[i]
            nb += 1
    bbe_cnt[b] = nb
    be = -1
    for i in range(nb):
        ke = bbe[b, i]
        if be == -1 or (_slack(ke, eu, ev, ew, dualvar) <
                        _slack(be, eu, ev, ew, dualvar)):
            be = ke
    bestedge[b] = be


@njit(cache=True)
def _expand_blossom(b0, endstage, n, eu, ev, dualvar, mate, label, labelend,
                    bestedge, allowedge, inblossom, blossomparent,
                    blossombase, childs, childs_cnt, endps, endps_cnt,
                    bbe_cnt, unused, un, queue, qn, lv_stack, lv_out, estack):
    es = 0
    estack[es] = b0
    es += 1
    while es > 0:
        es -= 1
        b = estack[es]
        cnt = childs_cnt[b]
        for ci in range(cnt):
            s = childs[b, ci]
            blossomparent[s] = -1
            if s < n:
                inblossom[s] = s
            elif endstage and dualvar[s] == 0.0:
                estack[es] = s
                es += 1
            else:
                lcnt = _blossom_leaves(s, n, childs, childs_cnt, lv_stack,
                                       lv_out)
                for li in range(lcnt):
                    inblossom[lv_out[li]] = s

        if (not endstage) and label[b] == 2:
            # the expanded blossom carried a T-label: relabel the even-depth
            # children along the path from the entry child to the base, and
            # clear labels on the odd-depth ones
            entrychild = inblossom[_endpoint(labelend[b] ^ 1, eu, ev)]
            j = 0
            while childs[b, j] != entrychild:
                j += 1
            if (j & 1) != 0:
                j -= cnt
                jstep = 1
                ept = 0
            else:
                jstep = -1
                ept = 1
            p = labelend[b]
            while j != 0:
                label[_endpoint(p ^ 1, eu, ev)] = 0
                q0 = endps[b, (j - ept) % cnt]
                label[_endpoint(q0 ^ ept ^ 1, eu, ev)] = 0
                _assign_label(_endpoint(p ^ 1, eu, ev), 2, p, n, eu, ev, mate,
                              label, labelend, bestedge, inblossom,
                              blossombase, childs, childs_cnt, queue, qn,
                              lv_stack, lv_out)
                allowedge[q0 >> 1] = 1
                j += jstep
                p = endps[b, (j - ept) % cnt] ^ ept
                allowedge[p >> 1] = 1
                j += jstep
            bv = childs[b, 0]
            vtx = _endpoint(p ^ 1, eu, ev)
            label[vtx] = 2
            label[bv] = 2
            labelend[vtx] = p
            labelend[bv] = p
            bestedge[bv] = -1
            j += jstep
            while childs[b, j % cnt] != entrychild:
                bv = childs[b, j % cnt]
                if label[bv] == 1:
                    j += jstep
                    continue
                lcnt = _blossom_leaves(bv, n, childs, childs_cnt, lv_stack,
                                       lv_out)
                vx = -1
                for li in range(lcnt):
                    if label[lv_out[li]] != 0:
                        vx = lv_out[li]
                        break
                if vx >= 0:
                    label[vx] = 0
                    label[_endpoint(mate[blossombase[bv]], eu, ev)] = 0
                    _assign_label(vx, 2, labelend[vx], n, eu, ev, mate, label,
                                  labelend, bestedge, inblossom, blossombase,
                                  childs, childs_cnt, queue, qn, lv_stack,
                                  lv_out)
                j += jstep

        # recycle the blossom slot
        label[b] = -1
        labelend[b] = -1
        childs_cnt[b] = 0
        endps_cnt[b] = 0
        blossombase[b] = -1
        bbe_cnt[b] = -1
        bestedge[b] = -1
        unused[un[0]] = b
        un[0] += 1


@njit(cache=True)
def _augment_blossom(b0, v0, n, eu, ev, mate, blossomparent, blossombase,
                     childs, childs_cnt, endps, fb, fv, ft, fi, fj, fp,
                     fphase, fjstep, fept, tmp):
    """Rotate blossom b0 so that v0 becomes its base, mating internal pairs.

    Explicit-stack version of the naturally recursive procedure; each frame
    suspends at the three points where a sub-blossom must be rotated first.
    """
    sp = 0
    fb[0] = b0
    fv[0] = v0
    fphase[0] = 0
    while sp >= 0:
        b = fb[sp]
        phase = fphase[sp]
        if phase == 0:
            t = fv[sp]
            while blossomparent[t] != b:
                t = blossomparent[t]
            ft[sp] = t
            if t >= n:
                fphase[sp] = 1
                sp += 1
                fb[sp] = t
                fv[sp] = fv[sp - 1]
                fphase[sp] = 0
                continue
            fphase[sp] = 1
            continue
        if phase == 1:
            t = ft[sp]
            cnt = childs_cnt[b]
            i = 0
            while childs[b, i] != t:
                i += 1
            if (i & 1) != 0:
                j = i - cnt
                jstep = 1
                ept = 0
            else:
                j = i
                jstep = -1
                ept = 1
            fi[sp] = i
            fj[sp] = j
            fjstep[sp] = jstep
            fept[sp] = ept
            fphase[sp] = 2
            continue
        if phase == 2:
            j = fj[sp]
            if j == 0:
                # rotate the child/endpoint lists so the new base is first
                i = fi[sp]
                cnt = childs_cnt[b]
                if i > 0:
                    for x in range(cnt):
                        tmp[x] = childs[b, (i + x) % cnt]
                    for x in range(cnt):
                        childs[b, x] = tmp[x]
                    for x in range(cnt):
                        tmp[x] = endps[b, (i + x) % cnt]
                    for x in range(cnt):
                        endps[b, x] = tmp[x]
                blossombase[b] = blossombase[childs[b, 0]]
                sp -= 1
                continue
            jstep = fjstep[sp]
            ept = fept[sp]
            cnt = childs_cnt[b]
            j += jstep
            fj[sp] = j
            t = childs[b, j % cnt]
            p = endps[b, (j - ept) % cnt] ^ ept
            fp[sp] = p
            if t >= n:
                fphase[sp] = 3
                sp += 1
                fb[sp] = t
                fv[sp] = _endpoint(p, eu, ev)
                fphase[sp] = 0
                continue
            fphase[sp] = 3
            continue
        if phase == 3:
            jstep = fjstep[sp]
            cnt = childs_cnt[b]
            j = fj[sp] + jstep
            fj[sp] = j
            t = childs[b, j % cnt]
            p = fp[sp]
            if t >= n:
                fphase[sp] = 4
                sp += 1
                fb[sp] = t
                fv[sp] = _endpoint(p ^ 1, eu, ev)
                fphase[sp] = 0
                continue
            fphase[sp] = 4
            continue
        # phase == 4: mate the pair across endpoint p
        p = fp[sp]
        mate[_endpoint(p, eu, ev)] = p ^ 1
        mate[_endpoint(p ^ 1, eu, ev)] = p
        fphase[sp] = 2


@njit(cache=True)
def _augment_matching(k, n, eu, ev, mate, label, labelend, inblossom,
                      blossomparent, blossombase, childs, childs_cnt, endps,
                      fb, fv, ft, fi, fj, fp, fphase, fjstep, fept, tmp):
    for side in range(2):
        if side == 0:
            s = eu[k]
            p = 2 * k + 1
        else:
            s = ev[k]
            p = 2 * k
        while True:
            bs = inblossom[s]
            if bs >= n:
                _augment_blossom(bs, s, n, eu, ev, mate, blossomparent,
                                 blossombase, childs, childs_cnt, endps, fb,
                                 fv, ft, fi, fj, fp, fphase, fjstep, fept,
                                 tmp)
            mate[s] = p
            if labelend[bs] == -1:
                break
            t = _endpoint(labelend[bs], eu, ev)
            bt = inblossom[t]
            s = _endpoint(labelend[bt], eu, ev)
            j = _endpoint(labelend[bt] ^ 1, eu, ev)
            if bt >= n:
                _augment_blossom(bt, j, n, eu, ev, mate, blossomparent,
                                 blossombase, childs, childs_cnt, endps, fb,
                                 fv, ft, fi, fj, fp, fphase, fjstep, fept,
                                 tmp)
            mate[j] = labelend[bt]
            p = labelend[bt] ^ 1


@njit(cache=True)
def _mwm_core(n, eu, ev, ew, nbe_flat, nbe_off, maxcardinality):
    m = eu.shape[0]
    nb = 2 * n
    maxweight = 0.0
    for k in range(m):
        if ew[k] > maxweight:
            maxweight = ew[k]

    mate = np.full(n, -1, np.int64)
    label = np.zeros(nb, np.int64)
    labelend = np.full(nb, -1, np.int64)
    inblossom = np.arange(n, dtype=np.int64)
    blossomparent = np.full(nb, -1, np.int64)
    blossombase = np.full(nb, -1, np.int64)
    blossombase[:n] = np.arange(n, dtype=np.int64)
    childs = np.zeros((nb, n + 2), np.int64)
    childs_cnt = np.zeros(nb, np.int64)
    endps = np.zeros((nb, n + 2), np.int64)
    endps_cnt = np.zeros(nb, np.int64)
    bestedge = np.full(nb, -1, np.int64)
    bbe = np.zeros((nb, nb), np.int64)
    bbe_cnt = np.full(nb, -1, np.int64)
    dualvar = np.zeros(nb, np.float64)
    dualvar[:n] = maxweight
    allowedge = np.zeros(m, np.uint8)
    qcap = 16 * n + 64
    queue = np.zeros(qcap, np.int64)
    qn = np.zeros(1, np.int64)
    unused = np.zeros(n + 1, np.int64)
    for i in range(n):
        unused[i] = n + i
    un = np.zeros(1, np.int64)
    un[0] = n
    # scratch
    lv_stack = np.zeros(nb + 2, np.int64)
    lv_out = np.zeros(n + 1, np.int64)
    path = np.zeros(nb + 2, np.int64)
    bet = np.zeros(nb, np.int64)
    estack = np.zeros(nb + 2, np.int64)
    fb = np.zeros(nb + 4, np.int64)
    fv = np.zeros(nb + 4, np.int64)
    ft = np.zeros(nb + 4, np.int64)
    fi = np.zeros(nb + 4, np.int64)
    fj = np.zeros(nb + 4, np.int64)
    fp = np.zeros(nb + 4, np.int64)
    fphase = np.zeros(nb + 4, np.int64)
    fjstep = np.zeros(nb + 4, np.int64)
    fept = np.zeros(nb + 4, np.int64)
    tmp = np.zeros(n + 2, np.int64)

    for _stage in range(n):
        label[:] = 0
        bestedge[:] = -1
        bbe_cnt[:] = -1
        allowedge[:] = 0
        qn[0] = 0

        for v in range(n):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                _assign_label(v, 1, -1, n, eu, ev, mate, label, labelend,
                              bestedge, inblossom, blossombase, childs,
                              childs_cnt, queue, qn, lv_stack, lv_out)

        augmented = False
        while True:
            while qn[0] > 0 and not augmented:
                qn[0] -= 1
                v = queue[qn[0]]
                for idx in range(nbe_off[v], nbe_off[v + 1]):
                    pp = nbe_flat[idx]
                    k = pp >> 1
                    w = _endpoint(pp, eu, ev)
                    if inblossom[v] == inblossom[w]:
                        continue
                    kslack = 0.0
                    if allowedge[k] == 0:
                        kslack = _slack(k, eu, ev, ew, dualvar)
                        if kslack <= 0.0:
                            allowedge[k] = 1
                    if allowedge[k] == 1:
                        bw = inblossom[w]
                        if label[bw] == 0:
                            _assign_label(w, 2, pp ^ 1, n, eu, ev, mate,
                                          label, labelend, bestedge,
                                          inblossom, blossombase, childs,
                                          childs_cnt, queue, qn, lv_stack,
                                          lv_out)
                        elif label[bw] == 1:
                            base = _scan_blossom(v, w, eu, ev, label,
                                                 labelend, inblossom,
                                                 blossombase, path)
                            if base >= 0:
                                _add_blossom(base, k, n, eu, ev, ew, dualvar,
                                             mate, label, labelend, bestedge,
                                             inblossom, blossomparent,
                                             blossombase, childs, childs_cnt,
                                             endps, endps_cnt, bbe, bbe_cnt,
                                             nbe_flat, nbe_off, unused, un,
                                             queue, qn, lv_stack, lv_out, bet)
                            else:
                                _augment_matching(k, n, eu, ev, mate, label,
                                                  labelend, inblossom,
                                                  blossomparent, blossombase,
                                                  childs, childs_cnt, endps,
                                                  fb, fv, ft, fi, fj, fp,
                                                  fphase, fjstep, fept, tmp)
                                augmented = True
                                break
                        elif label[w] == 0:
                            label[w] = 2
                            labelend[w] = pp ^ 1
                    elif label[inblossom[w]] == 1:
                        b = inblossom[v]
                        if (bestedge[b] == -1 or
                                kslack < _slack(bestedge[b], eu, ev, ew,
                                                dualvar)):
                            bestedge[b] = k
                    elif label[w] == 0:
                        if (bestedge[w] == -1 or
                                kslack < _slack(bestedge[w], eu, ev, ew,
                                                dualvar)):
                            bestedge[w] = k
            if augmented:
                break

            deltatype = -1
            delta = 0.0
            deltaedge = -1
            deltablossom = -1
            if not maxcardinality:
                deltatype = 1
                dmin = dualvar[0]
                for v in range(1, n):
                    if dualvar[v] < dmin:
                        dmin = dualvar[v]
                delta = max(0.0, dmin)
            for v in range(n):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    d = _slack(bestedge[v], eu, ev, ew, dualvar)
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = bestedge[v]
            for b in range(nb):
                if (blossomparent[b] == -1 and label[b] == 1 and
                        bestedge[b] != -1):
                    d = _slack(bestedge[b], eu, ev, ew, dualvar) / 2.0
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = bestedge[b]
            for b in range(n, nb):
                if (blossombase[b] >= 0 and blossomparent[b] == -1 and
                        label[b] == 2 and
                        (deltatype == -1 or dualvar[b] < delta)):
                    delta = dualvar[b]
                    deltatype = 4
                    deltablossom = b
            if deltatype == -1:
                # max-cardinality mode with nothing left to grow
                deltatype = 1
                dmin = dualvar[0]
                for v in range(1, n):
                    if dualvar[v] < dmin:
                        dmin = dualvar[v]
                delta = max(0.0, dmin)

            for v in range(n):
                lbl = label[inblossom[v]]
                if lbl == 1:
                    dualvar[v] -= delta
                elif lbl == 2:
                    dualvar[v] += delta
            for b in range(n, nb):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        dualvar[b] += delta
                    elif label[b] == 2:
                        dualvar[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allowedge[deltaedge] = 1
                i = eu[deltaedge]
                if label[inblossom[i]] == 0:
                    i = ev[deltaedge]
                queue[qn[0]] = i
                qn[0] += 1
            elif deltatype == 3:
                allowedge[deltaedge] = 1
                queue[qn[0]] = eu[deltaedge]
                qn[0] += 1
            else:
                _expand_blossom(deltablossom, False, n, eu, ev, dualvar, mate,
                                label, labelend, bestedge, allowedge,
                                inblossom, blossomparent, blossombase, childs,
                                childs_cnt, endps, endps_cnt, bbe_cnt, unused,
                                un, queue, qn, lv_stack, lv_out, estack)

        if not augmented:
            break

        for b in range(n, nb):
            if (blossomparent[b] == -1 and blossombase[b] >= 0 and
                    label[b] == 1 and dualvar[b] == 0.0):
                _expand_blossom(b, True, n, eu, ev, dualvar, mate, label,
                                labelend, bestedge, allowedge, inblossom,
                                blossomparent, blossombase, childs,
                                childs_cnt, endps, endps_cnt, bbe_cnt, unused,
                                un, queue, qn, lv_stack, lv_out, estack)

    partner = np.full(n, -1, np.int64)
    for v in range(n):
        if mate[v] >= 0:
            partner[v] = _endpoint(mate[v], eu, ev)
    return partner


def max_weight_matching(edges_u: np.ndarray, edges_v: np.ndarray,
                        weights: np.ndarray, n: int,
                        maxcardinality: bool = False) -> np.ndarray:
    """Maximum-weight matching; returns partner[v] (or -1 if unmatched).

    With ``maxcardinality`` the cardinality is maximised first and the weight
    among maximum-cardinality matchings second.
    """
    eu = np.ascontiguousarray(edges_u, np.int64)
    ev = np.ascontiguousarray(edges_v, np.int64)
    ew = np.ascontiguousarray(weights, np.float64)
    m = eu.shape[0]
    if m == 0 or n == 0:
        return np.full(n, -1, np.int64)
    if eu.min() < 0 or max(eu.max(), ev.max()) >= n:
        raise ValueError("edge endpoint out of range")
    if np.any(eu == ev):
        raise ValueError("self-loops are not allowed")
    # CSR of half-edges: neighbour list of v holds the remote endpoint index
    deg = np.bincount(eu, minlength=n) + np.bincount(ev, minlength=n)
    nbe_off = np.zeros(n + 1, np.int64)
    np.cumsum(deg, out=nbe_off[1:])
    owners = np.concatenate([eu, ev])
    remote = np.concatenate([2 * np.arange(m, dtype=np.int64) + 1,
                             2 * np.arange(m, dtype=np.int64)])
    nbe_flat = remote[np.argsort(owners, kind="stable")]
    return _mwm_core(n, eu, ev, ew, nbe_flat, nbe_off, maxcardinality)


@lru_cache(maxsize=128)
def _triu_cached(n: int):
    return np.triu_indices(n, 1)


def min_weight_perfect_matching_dense(dist: np.ndarray) -> np.ndarray:
    """Exact minimum-weight perfect matching on a complete graph.

    ``dist`` is a symmetric (n, n) array of finite non-negative weights with
    n even.  Returns partner[v] for every v.
    """
    n = dist.shape[0]
    if n == 0:
        return np.zeros(0, np.int64)
    if n % 2 != 0:
        raise ValueError("perfect matching needs an even number of nodes")
    D = np.ascontiguousarray(dist, np.float64)
    iu, jv = _triu_cached(n)
    w = D[iu, jv]
    if not np.all(np.isfinite(w)):
        raise ValueError("non-finite matching weight")
    wt = (w.max() + 1.0) - w
    partner = max_weight_matching(iu, jv, wt, n, maxcardinality=True)
    if np.any(partner < 0):
        raise RuntimeError("failed to find a perfect matching")
    return partner
