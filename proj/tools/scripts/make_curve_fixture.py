#!/usr/bin/env python3
"""Build a labeled elliptic-curve CSV (label,a1,a2,a3,a4,a6,conductor,rank).

Enumerates small Weierstrass models, reduces them to global minimal models,
keeps curves with conductor <= --max-conductor, and attaches the conductor
and analytic rank computed by PARI. Requires numpy and cypari2.

A curve can only have conductor <= B if the radical of its discriminant,
with the primes 2 and 3 removed, is <= B. That test is done vectorised over
a whole block of models before any PARI call.

The output has the same layout as a converted LMFDB export, so it can be fed
to `mathds ec ap` and `mathds murmur` directly.
"""
import argparse
import itertools
import sys

import cypari2
import numpy as np


def small_primes(limit):
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return sieve


def candidates(a1, a2, a3, a4, a6, bound, is_prime):
    """Boolean mask of models that may have conductor <= bound."""
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    ok = disc != 0
    m = np.abs(disc)
    rad = np.ones_like(m)
    for p in (2, 3):
        while True:
            hit = (m % p == 0) & (m > 0)
            if not hit.any():
                break
            m = np.where(hit, m // p, m)
    for p in range(5, 100):
        if not is_prime[p]:
            continue
        hit = (m % p == 0) & (m > 0)
        if not hit.any():
            continue
        rad = np.where(hit, rad * p, rad)
        while hit.any():
            m = np.where(hit, m // p, m)
            hit = (m % p == 0) & (m > 0)
    # Any prime left is >= 101, and two of them already exceed 10^4, so the
    # cofactor has to be a single prime power q^e.
    good_cof = m == 1
    for e in range(1, 8):
        q = np.rint(np.power(m.astype(np.float64), 1.0 / e)).astype(np.int64)
        q = np.clip(q, 0, len(is_prime) - 1)
        match = (m > 1) & (q**e == m) & is_prime[q] & (rad * q <= bound)
        good_cof |= match
    return ok & good_cof & (rad <= bound)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--a4", type=int, default=300)
    ap.add_argument("--a6", type=int, default=3000)
    ap.add_argument("--max-conductor", type=int, default=10000)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    pari = cypari2.Pari()
    pari.allocatemem(512 * 1024 * 1024)
    is_prime = small_primes(max(args.max_conductor, 100))
    a6_all = np.arange(-args.a6, args.a6 + 1, dtype=np.int64)
    a4_all = np.arange(-args.a4, args.a4 + 1, dtype=np.int64)
    A4, A6 = np.meshgrid(a4_all, a6_all, indexing="ij")
    A4, A6 = A4.ravel(), A6.ravel()
    seen = {}
    for a1, a3, a2 in itertools.product([0, 1], [0, 1], [-1, 0, 1]):
        mask = candidates(a1, a2, a3, A4, A6, args.max_conductor, is_prime)
        for a4, a6 in zip(A4[mask].tolist(), A6[mask].tolist()):
            E = pari.ellinit([a1, a2, a3, a4, a6])
            M = pari.ellminimalmodel(E)
            N = int(pari.ellglobalred(M)[0])
            if N > args.max_conductor:
                continue
            key = tuple(int(x) for x in M[:5])
            seen.setdefault(key, N)
        print(f"scanned a1={a1} a3={a3} a2={a2}: {int(mask.sum())} candidates, {len(seen)} curves",
              file=sys.stderr, flush=True)

    rows = sorted((N, key) for key, N in seen.items())
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    out.write("label,a1,a2,a3,a4,a6,conductor,rank\n")
    per_conductor = {}
    for N, key in rows:
        E = pari.ellinit(list(key))
        rank = int(pari.ellanalyticrank(E)[0])
        i = per_conductor.get(N, 0) + 1
        per_conductor[N] = i
        out.write(f"{N}.x{i},{key[0]},{key[1]},{key[2]},{key[3]},{key[4]},{N},{rank}\n")
    out.close()


if __name__ == "__main__":
    main()
