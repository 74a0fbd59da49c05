"""Regular Gallager LDPC baseline: construction, systematic encoding, sum-product decoding.

Codes are (dv, dc)-regular bipartite graphs built from a random socket
permutation, repaired by edge swaps to remove parallel edges and (when
feasible) length-4 cycles. Encoding comes from a GF(2) row reduction of the
parity-check matrix; rank deficiencies are repaired by dropping dependent
rows, so the realized information length can exceed the nominal n - m.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .seeding import make_rng

_ATANH_CLIP = float(np.nextafter(1.0, 0.0))


class LdpcConstructionError(RuntimeError):
    pass


@dataclass
class LdpcCode:
    """One LDPC code: decoding graph plus a systematic encoder.

    row_cols holds, per parity check, the sorted participating variable
    indices (padded with -1 for irregular imports). Codewords satisfy
    H c^T = 0; info bits appear verbatim at info_cols.
    """

    row_cols: np.ndarray
    n: int
    pivot_cols: np.ndarray
    info_cols: np.ndarray
    parity_map: np.ndarray
    dv: int
    dc: int
    seed: int
    removed_rows: np.ndarray
    _bp_cache: dict = field(default=None, repr=False, compare=False)

    @property
    def m(self):
        return self.row_cols.shape[0]

    @property
    def k(self):
        return int(self.info_cols.size)

    @property
    def rate(self):
        return self.k / self.n

    def to_dense(self):
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        for r in range(self.m):
            cols = self.row_cols[r]
            h[r, cols[cols >= 0]] = 1
        return h


def _first_violation(chk_rows, m, min_girth):
    """Edge index of the first parallel edge or 4-cycle, or -1 when clean.

    chk_rows is the (n, dv) per-variable check list; edges are numbered
    variable-major, so edge v*dv + j is slot j of variable v.
    """
    n, dv = chk_rows.shape
    srt = np.sort(chk_rows, axis=1)
    dup_rows = np.nonzero((srt[:, 1:] == srt[:, :-1]).any(axis=1))[0]
    if dup_rows.size:
        v = int(dup_rows[0])
        row = chk_rows[v]
        pos = np.nonzero(srt[v, 1:] == srt[v, :-1])[0][0]
        value = srt[v, pos]
        return v * dv + int(np.nonzero(row == value)[0][1])
    if min_girth < 6:
        return -1
    combos = list(itertools.combinations(range(dv), 2))
    keys = np.empty((n, len(combos)), dtype=np.int64)
    for j, (a, b) in enumerate(combos):
        keys[:, j] = srt[:, a] * m + srt[:, b]
    flat = keys.ravel()
    order = np.argsort(flat, kind="stable")
    eq = np.nonzero(flat[order][1:] == flat[order][:-1])[0]
    if eq.size == 0:
        return -1
    f = int(order[eq[0] + 1])
    v, j = divmod(f, len(combos))
    value = srt[v, combos[j][1]]
    return v * dv + int(np.nonzero(chk_rows[v] == value)[0][0])


def _gf2_eliminate(h_dense):
    """Packed GF(2) row reduction with identity augmentation.

    Returns (rank, pivot_cols, rref, removable_rows): rref is the (rank, n)
    reduced matrix; removable_rows are original row indices whose removal
    leaves the row space intact (one per rank deficiency).
    """
    m, n = h_dense.shape
    nb = (n + 7) // 8
    data = np.packbits(h_dense, axis=1)
    ident = np.packbits(np.eye(m, dtype=np.uint8), axis=1)
    aug = np.concatenate([data, ident], axis=1)
    r = 0
    pivot_cols = []
    for c in range(n):
        if r == m:
            break
        byte, bit = divmod(c, 8)
        mask = np.uint8(0x80 >> bit)
        below = np.nonzero(aug[r:, byte] & mask)[0]
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            aug[[r, p]] = aug[[p, r]]
        elim = np.nonzero(aug[:, byte] & mask)[0]
        elim = elim[elim != r]
        if elim.size:
            aug[elim] ^= aug[r]
        pivot_cols.append(c)
        r += 1
    rank = r
    rref = np.unpackbits(aug[:rank, :nb], axis=1, count=n)
    null_comb = np.unpackbits(aug[rank:, nb:], axis=1, count=m)
    removable = np.array(_rref_pivots(null_comb), dtype=np.int64)
    return rank, np.array(pivot_cols, dtype=np.int64), rref, removable


def _rref_pivots(mat):
    """Pivot columns of a small dense GF(2) matrix (row-reduces a copy)."""
    mat = mat.copy()
    rows = mat.shape[0]
    r = 0
    pivots = []
    for c in range(mat.shape[1] if rows else 0):
        if r == rows:
            break
        nz = np.nonzero(mat[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            mat[[r, p]] = mat[[p, r]]
        others = np.nonzero(mat[:, c])[0]
        others = others[others != r]
        if others.size:
            mat[others] ^= mat[r]
        pivots.append(c)
        r += 1
    return pivots


def _assemble_code(h_dense, dv, dc, seed):
    m, n = h_dense.shape
    rank, pivot_cols, rref, removable = _gf2_eliminate(h_dense)
    keep = np.setdiff1d(np.arange(m), removable)
    h_kept = h_dense[keep]
    degrees = h_kept.sum(axis=1).astype(np.int64)
    width = int(degrees.max()) if degrees.size else 0
    row_cols = np.full((h_kept.shape[0], width), -1, dtype=np.int64)
    for r in range(h_kept.shape[0]):
        cols = np.nonzero(h_kept[r])[0]
        row_cols[r, : cols.size] = cols
    info_cols = np.setdiff1d(np.arange(n), pivot_cols)
    parity_map = rref[:, info_cols].astype(np.uint8)
    return LdpcCode(
        row_cols=row_cols,
        n=n,
        pivot_cols=pivot_cols,
        info_cols=info_cols,
        parity_map=parity_map,
        dv=dv,
        dc=dc,
        seed=seed,
        removed_rows=removable,
    )


def generate_regular_ldpc(n, dv=3, dc=6, seed=0, min_girth=6, max_swaps=None):
    """Random (dv, dc)-regular code, deterministic given the seed.

    Parallel edges are always removed; with min_girth >= 6, 4-cycles are
    removed too. Raises LdpcConstructionError when the swap budget runs out.
    Note that very short codes cannot be 4-cycle-free at all: n variables
    supply n * dv*(dv-1)/2 check pairs, which must all be distinct among
    m*(m-1)/2, so e.g. (3, 6) at n=16 is infeasible; pass min_girth=4 there.
    """
    if n <= 0 or n % 2:
        raise ValueError(f"block length must be positive and even, got {n}")
    if dv < 2 or dc <= dv:
        raise ValueError("need 2 <= dv < dc")
    if (n * dv) % dc:
        raise ValueError(f"n*dv = {n * dv} not divisible by dc = {dc}")
    m = n * dv // dc
    if max_swaps is None:
        max_swaps = max(20_000, 50 * n)
    rng = make_rng(seed)
    chk = np.repeat(np.arange(m, dtype=np.int64), dc)
    chk = chk[rng.permutation(chk.size)]
    chk_rows = chk.reshape(n, dv)
    for _ in range(max_swaps):
        bad = _first_violation(chk_rows, m, min_girth)
        if bad < 0:
            break
        j = int(rng.integers(chk.size))
        chk.flat[bad], chk.flat[j] = chk.flat[j], chk.flat[bad]
    else:
        raise LdpcConstructionError(
            f"could not reach girth {min_girth} for a ({dv},{dc}) code of "
            f"length {n} within {max_swaps} swaps (seed {seed})"
        )
    h = np.zeros((m, n), dtype=np.uint8)
    h[chk, np.repeat(np.arange(n), dv)] = 1
    return _assemble_code(h, dv, dc, seed)


def ldpc_encode(info, code):
    """Systematic encoding; the output lies in the null space of H.

    info may be (k,) or a batch (B, k).
    """
    info = np.asarray(info)
    if info.shape[-1] != code.k:
        raise ValueError(f"info length {info.shape[-1]} != k = {code.k}")
    if info.size and not np.isin(info, (0, 1)).all():
        raise ValueError("info bits must be 0 or 1")
    info = info.astype(np.uint8)
    lead = info.shape[:-1]
    out = np.zeros(lead + (code.n,), dtype=np.uint8)
    out[..., code.info_cols] = info
    # float32 matmul is exact here (row sums < 2^24) and hits BLAS
    parity = info.astype(np.float32) @ code.parity_map.T.astype(np.float32)
    out[..., code.pivot_cols] = parity.astype(np.int64) & 1
    return out


def extract_info(codeword, code):
    """Systematic info bits of a (possibly batched) codeword."""
    return np.asarray(codeword)[..., code.info_cols]


def _bp_setup(code):
    if code._bp_cache is not None:
        return code._bp_cache
    width = code.row_cols.shape[1]
    pad = code.row_cols < 0
    edge_var = code.row_cols[~pad]
    flat_real = np.nonzero(~pad.ravel())[0]
    flat_pad = np.nonzero(pad.ravel())[0]
    row_deg = (~pad).sum(axis=1)
    row_starts = np.zeros(code.m, dtype=np.int64)
    np.cumsum(row_deg[:-1], out=row_starts[1:])
    vm_order = np.argsort(edge_var, kind="stable")
    sorted_vars = edge_var[vm_order]
    group_vars, group_starts = np.unique(sorted_vars, return_index=True)
    cache = {
        "width": width,
        "edge_var": edge_var,
        "flat_real": flat_real,
        "flat_pad": flat_pad,
        "row_starts": row_starts,
        "vm_order": vm_order,
        "group_vars": group_vars,
        "group_starts": group_starts,
    }
    code._bp_cache = cache
    return cache


def bp_decode_batch(llrs, code, max_iters=50):
    """Flooding sum-product over a batch (B, n) of LLR frames.

    Returns (hard (B, n) uint8, converged (B,), iters_used (B,)). A frame
    converges when its hard decision satisfies every parity check and no
    total LLR is exactly zero (an all-zero input carries no information and
    is reported as non-converged). Converged frames stop iterating early.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 2 or llrs.shape[1] != code.n:
        raise ValueError(f"LLR batch must have shape (B, {code.n})")
    if not np.isfinite(llrs).all():
        raise ValueError("LLRs must be finite")
    cache = _bp_setup(code)
    width = cache["width"]
    edge_var = cache["edge_var"]
    flat_real = cache["flat_real"]
    flat_pad = cache["flat_pad"]
    row_starts = cache["row_starts"]
    vm_order = cache["vm_order"]
    group_vars = cache["group_vars"]
    group_starts = cache["group_starts"]
    m = code.m
    batch = llrs.shape[0]

    hard_out = np.zeros((batch, code.n), dtype=np.uint8)
    conv_out = np.zeros(batch, dtype=bool)
    iters_out = np.full(batch, max_iters, dtype=np.int64)

    active = np.arange(batch)
    chan = llrs
    v2c = np.zeros((batch, m * width))
    v2c[:, flat_real] = chan[:, edge_var]

    for it in range(1, max_iters + 1):
        t = np.tanh(0.5 * v2c)
        if flat_pad.size:
            t[:, flat_pad] = 1.0  # padded slots are neutral in the product
        t3 = t.reshape(-1, m, width)
        pref = np.ones_like(t3)
        np.cumprod(t3[..., :-1], axis=2, out=pref[..., 1:])
        rev = np.cumprod(t3[..., ::-1], axis=2)[..., ::-1]
        suf = np.ones_like(t3)
        suf[..., :-1] = rev[..., 1:]
        excl = (pref * suf).reshape(-1, m * width)
        c2v = 2.0 * np.arctanh(
            np.clip(excl[:, flat_real], -_ATANH_CLIP, _ATANH_CLIP)
        )
        total = chan.copy()
        total[:, group_vars] += np.add.reduceat(
            c2v[:, vm_order], group_starts, axis=1
        )
        hard = (total < 0.0).astype(np.uint8)
        parity = np.add.reduceat(hard[:, edge_var], row_starts, axis=1) & 1
        satisfied = ~parity.any(axis=1)
        ties = (total == 0.0).any(axis=1)
        done = satisfied & ~ties

        if it == max_iters:
            hard_out[active] = hard
            conv_out[active[done]] = True
            iters_out[active[done]] = it
            return hard_out, conv_out, iters_out

        if done.any():
            finished = active[done]
            hard_out[finished] = hard[done]
            conv_out[finished] = True
            iters_out[finished] = it
            keep = ~done
            active = active[keep]
            if active.size == 0:
                return hard_out, conv_out, iters_out
            total = total[keep]
            c2v = c2v[keep]
            chan = chan[keep]

        v2c = np.zeros((active.size, m * width))
        v2c[:, flat_real] = total[:, edge_var] - c2v

    return hard_out, conv_out, iters_out


def bp_decode(llrs, code, max_iters=50):
    """Decode one frame; returns (hard decision bits, converged flag, iterations used)."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 1:
        raise ValueError("bp_decode expects a 1-D LLR vector")
    hard, conv, iters = bp_decode_batch(llrs[None, :], code, max_iters=max_iters)
    return hard[0], bool(conv[0]), int(iters[0])


def export_alist(code, path):
    """Write the parity-check matrix in alist interchange format."""
    write_alist(code.to_dense(), path)


def write_alist(h_dense, path):
    h = np.asarray(h_dense, dtype=np.uint8)
    m, n = h.shape
    col_w = h.sum(axis=0).astype(int)
    row_w = h.sum(axis=1).astype(int)
    max_cw = int(col_w.max()) if n else 0
    max_rw = int(row_w.max()) if m else 0
    lines = [
        f"{n} {m}",
        f"{max_cw} {max_rw}",
        " ".join(str(w) for w in col_w),
        " ".join(str(w) for w in row_w),
    ]
    for c in range(n):
        rows = np.nonzero(h[:, c])[0] + 1
        entries = list(rows) + [0] * (max_cw - rows.size)
        lines.append(" ".join(str(int(e)) for e in entries))
    for r in range(m):
        cols = np.nonzero(h[r])[0] + 1
        entries = list(cols) + [0] * (max_rw - cols.size)
        lines.append(" ".join(str(int(e)) for e in entries))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_alist(path):
    """Dense parity-check matrix from an alist file (zero-padded entries ignored)."""
    with open(path, "r", encoding="ascii") as fh:
        tokens_by_line = [line.split() for line in fh if line.strip()]
    n, m = (int(x) for x in tokens_by_line[0][:2])
    h = np.zeros((m, n), dtype=np.uint8)
    for c in range(n):
        for tok in tokens_by_line[4 + c]:
            r = int(tok)
            if r:
                h[r - 1, c] = 1
    return h


def import_alist(path, seed=0):
    """Build an LdpcCode (encoder included) from an external alist matrix."""
    h = read_alist(path)
    dv = int(h.sum(axis=0).max()) if h.shape[1] else 0
    dc = int(h.sum(axis=1).max()) if h.shape[0] else 0
    return _assemble_code(h, dv, dc, seed)
