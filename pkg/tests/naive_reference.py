"""Straight-line reference implementations used as test oracles.

Everything here is deliberately plain Python over lists: explicit loops,
no NumPy, no code shared with the package. The score formulas follow the
documented contracts (same accumulation orders), so the production path
must reproduce these values exactly.
"""

from __future__ import annotations

import math


def enlarged_range(values):
    vmin = min(values)
    vmax = max(values)
    length = vmax - vmin
    lo = vmin - 0.0005 * length
    hi = vmax + 0.0005 * length
    return lo, hi


def section_of(x, lo, width, scn):
    if width == 0.0:
        return 1
    sid = math.floor((x - lo) / width) + 1
    return min(max(sid, 1), scn)


def build_sections(data, scn):
    """Per-dimension section ids (1-based), occupancy, and occupied counts."""
    n = len(data)
    m = len(data[0])
    ids = []       # ids[i][j]
    occupancy = []  # occupancy[i][sid-1]
    nonempty = []
    for i in range(m):
        column = [data[j][i] for j in range(n)]
        lo, hi = enlarged_range(column)
        width = (hi - lo) / scn
        sids = [section_of(x, lo, width, scn) for x in column]
        counts = [0] * scn
        for sid in sids:
            counts[sid - 1] += 1
        ids.append(sids)
        occupancy.append(counts)
        nonempty.append(sum(1 for c in counts if c > 0))
    return ids, occupancy, nonempty


def full_schedule(m):
    return [(i, j) for i in range(m) for j in range(m) if j != i]


def gate_threshold(k):
    return math.ceil(3 * k / 2)


def _kns_event_values(members, tgt_ids, k):
    """Raw projected ratios for one scored section (k-nearest dispersion)."""
    s = len(members)
    d_sums = []
    for f in members:
        gaps = []
        for q in members:
            if q == f:
                continue
            gaps.append((abs(tgt_ids[f] - tgt_ids[q]) + 1, q))
        gaps.sort()  # by distance, then ascending point id
        d_sums.append(sum(g * g for g, _ in gaps[:k]))
    total = sum(d_sums)
    return {f: (s * d_sums[idx]) / total for idx, f in enumerate(members)}


def _psd_event_values(members, tgt_ids, occupancy_t, clu_len_t):
    s = len(members)
    prods = [occupancy_t[tgt_ids[f] - 1] * clu_len_t[tgt_ids[f] - 1] for f in members]
    total = sum(prods)
    return {f: (s * prods[idx]) / total for idx, f in enumerate(members)}


def cluster_lengths(counts):
    """Length of the contiguous occupied run containing each section."""
    scn = len(counts)
    lengths = [0] * scn
    sec = 0
    while sec < scn:
        if counts[sec] == 0:
            sec += 1
            continue
        end = sec
        while end < scn and counts[end] > 0:
            end += 1
        for pos in range(sec, end):
            lengths[pos] = end - sec
        sec = end
    return lengths


def score(data, scn, k, schedule, algo="kns", variant="reciprocal",
          dst=None, w1=None, w2=None):
    """Reference scores for the sectioned detectors.

    ``schedule`` is an explicit list of (source, target) dimension pairs,
    executed in order. ``algo`` selects the projected statistic: "kns"
    (k-nearest dispersion ratio, entering the reciprocal variant through
    its reciprocal) or "psd" (occupancy-times-run ratio, entering
    literally).
    """
    n = len(data)
    m = len(data[0])
    ids, occupancy, nonempty = build_sections(data, scn)

    sv_raw = [0.0] * n
    sv_sq = [0.0] * n
    for i in range(m):
        for j in range(n):
            ratio = (occupancy[i][ids[i][j] - 1] * nonempty[i]) / n
            sv = ratio * ratio
            sv_raw[j] += sv
            sv_sq[j] += sv * sv

    gate = dst if (algo == "psd" and dst is not None) else gate_threshold(k)
    clu = [cluster_lengths(occupancy[i]) for i in range(m)]

    svp_raw = [0.0] * n
    svp_acc = [0.0] * n
    for src, tgt in schedule:
        values = [1.0] * n
        for sec in range(1, scn + 1):
            members = [j for j in range(n) if ids[src][j] == sec]
            if not members or len(members) < gate:
                continue
            if algo == "kns":
                section_values = _kns_event_values(members, ids[tgt], k)
            else:
                section_values = _psd_event_values(
                    members, ids[tgt], occupancy[tgt], clu[tgt]
                )
            for f, v in section_values.items():
                values[f] = v
        for j in range(n):
            v = values[j]
            svp_raw[j] += v
            if algo == "kns":
                svp_acc[j] += 1.0 / (v * v)
            else:
                svp_acc[j] += v * v

    n_events = len(schedule)
    if variant == "reciprocal":
        return [2.0 / (sv_sq[j] / m + svp_acc[j] / n_events) for j in range(n)]
    w1 = w1 if w1 is not None else 1.0 / m
    w2 = w2 if w2 is not None else 1.0 / (m * (m - 1))
    return [w1 * sv_raw[j] + w2 * svp_raw[j] for j in range(n)]


def lof(data, knn):
    """Textbook local outlier factor by direct definition over all pairs."""
    n = len(data)
    m = len(data[0])

    def dist(a, b):
        return math.sqrt(sum((data[a][i] - data[b][i]) ** 2 for i in range(m)))

    neighbors = []
    k_dist = []
    for p in range(n):
        ranked = sorted((dist(p, q), q) for q in range(n) if q != p)
        nb = [q for _, q in ranked[:knn]]
        neighbors.append(nb)
        k_dist.append(max(dist(p, q) for q in nb))

    lrd = []
    for p in range(n):
        reach = [max(k_dist[q], dist(p, q)) for q in neighbors[p]]
        mean_reach = sum(reach) / len(reach)
        lrd.append(math.inf if mean_reach == 0 else 1.0 / mean_reach)

    out = []
    for p in range(n):
        ratio = sum(lrd[q] for q in neighbors[p]) / len(neighbors[p]) / lrd[p]
        out.append(ratio if math.isfinite(ratio) else 1.0)
    return out
