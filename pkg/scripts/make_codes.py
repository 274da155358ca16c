#!/usr/bin/env python3
"""Regenerate the bundled rate-1/2 test codes in src/ldpcqubo/data/.

Column-by-column random construction (column weight 3, row weight 6) that
rejects columns creating 4-cycles and keeps only full-rank results.
Deterministic for a given seed.

    python scripts/make_codes.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ldpcqubo.codes import ParityCheckMatrix, gf2_rank, parse_alist, to_alist

OUT = Path(__file__).resolve().parent.parent / "src" / "ldpcqubo" / "data"


def regular_no4cycles(n: int, m: int, wc: int, wr: int, rng, tries: int = 2000):
    for _ in range(tries):
        h = np.zeros((m, n), dtype=np.uint8)
        ok = True
        for j in range(n):
            placed = False
            for _ in range(200):
                room = np.flatnonzero(h.sum(axis=1) < wr)
                if room.size < wc:
                    break
                # prefer the emptiest rows so the last columns still fit
                load = h[room].sum(axis=1) + rng.random(room.size)
                rows = room[np.argsort(load)[: wc + 2]]
                rows = rng.choice(rows, wc, replace=False)
                overlap = h[rows].astype(int).T @ np.ones(wc, dtype=int)
                # a 4-cycle appears if an earlier column shares >= 2 of these rows
                if (overlap[:j] >= 2).any():
                    continue
                h[rows, j] = 1
                placed = True
                break
            if not placed:
                ok = False
                break
        if ok and (h.sum(axis=1) == wr).all() and gf2_rank(h) == m:
            return h
    raise RuntimeError("construction failed")


def girth_at_least_6(h: np.ndarray) -> bool:
    overlap = h.astype(int).T @ h.astype(int)
    np.fill_diagonal(overlap, 0)
    return bool((overlap <= 1).all())


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for n, seed in ((32, 2024), (96, 2024)):
        m = n // 2
        h = regular_no4cycles(n, m, 3, 6, np.random.default_rng(seed))
        assert girth_at_least_6(h)
        pcm = ParityCheckMatrix.from_dense(h)
        text = to_alist(pcm)
        assert parse_alist(text).entries == pcm.entries
        path = OUT / f"ldpc_{n}_{m}.alist"
        path.write_text(text)
        print(f"wrote {path} rank={gf2_rank(h)}")
    # toy code for exhaustive checks: n=8, 4 checks
    toy = np.array(
        [
            [0, 1, 1, 1, 0, 1, 0, 0],
            [0, 1, 1, 0, 1, 0, 1, 0],
            [1, 1, 1, 0, 1, 0, 0, 0],
            [0, 0, 1, 0, 0, 1, 1, 1],
        ],
        dtype=np.uint8,
    )
    (OUT / "toy_8_4.alist").write_text(to_alist(ParityCheckMatrix.from_dense(toy)))
    print("wrote toy_8_4.alist rank", gf2_rank(toy))


if __name__ == "__main__":
    main()
