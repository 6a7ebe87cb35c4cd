#!/usr/bin/env python3
"""Populate data/orbits/ with Atkin-Lehner-invariant newform orbit data.

Requires cypari2 (PARI/GP >= 2.15). One JSON record per Galois orbit of
newforms f in S_2(Gamma_0(M)) with w_q f = f for every prime q | M.

    python3 scripts/gen_fixtures.py --levels levels.txt --out data/orbits
"""
import argparse
import json
import os
import sys
import time

import cypari2

pari = cypari2.Pari()
pari.allocatemem(3 * 10**9, silent=True)

AP_PRIMES = [p for p in range(2, 48) if int(pari.isprime(p))]
SCHEMA = 1


def ap_key(rec):
    return [rec["dim"]] + [rec["ap"][str(p)] for p in sorted(map(int, rec["ap"]))[:4]]


def orbit_records(level, prec):
    mf = pari.mfinit([level, 2], 0)
    if int(pari.mfdim(mf)) == 0:
        return []
    primes = [int(q) for q in pari.factor(level)[0]]
    need = max(prec, max(AP_PRIMES))
    coefs = pari.mfcoefs(mf, need)  # (need+1) x dim
    forms, fields = pari.mfsplit(mf, 0, 0)
    out = []
    cache = {}

    def atkin(q):
        if q not in cache:
            cache[q] = pari.mfatkineigenvalues(mf, q)
        return cache[q]

    for idx, (vec, pol) in enumerate(zip(forms, fields)):
        n = int(pari.poldegree(pol))
        col = coefs * pari.Col(vec)
        a = lambda m: pari.Mod(pari.lift(col[m]), pol) if n > 1 else col[m]
        # weight 2, q || level: eigenvalue of w_q is -a_q
        signs = {}
        for q in primes:
            if q <= need:
                signs[q] = -int(pari.lift(a(q)) if n > 1 else a(q))
            else:
                signs[q] = int(atkin(q)[idx][0])
        if any(s != 1 for s in signs.values()):
            continue
        ap = {}
        for p in AP_PRIMES:
            if level % p == 0:
                continue
            cp = pari.charpoly(a(p)) if n > 1 else pari("x") - a(p)
            ap[str(p)] = [int(pari.polcoef(cp, i)) for i in range(n + 1)]
        # rational components of f = sum_i y^i G_i
        rows = []
        for i in range(n):
            row = []
            for m in range(1, prec + 1):
                c = pari.lift(col[m]) if n > 1 else col[m]
                row.append(pari.polcoef(c, i, "y") if n > 1 else c)
            rows.append(row)
        A = pari.matrix(prec, n, [rows[j][i] for i in range(prec) for j in range(n)])
        den = pari.denominator(A)
        L = pari.matrixqz(A * den, -2)  # saturation: Z^prec cap Q-span
        # echelonize on q^1, q^2, ...: HNF of the reversed coordinates
        rev = pari.matrix(prec, n, [L[prec - 1 - i, j] for i in range(prec) for j in range(n)])
        H = pari.mathnf(rev)
        basis = []
        for j in range(n):
            basis.append([int(H[prec - 1 - i, n - 1 - j]) for i in range(prec)])
        for b in basis:
            lead = next(x for x in b if x != 0)
            if lead < 0:
                b[:] = [-x for x in b]
        out.append({
            "schema": SCHEMA,
            "level": level,
            "dim": n,
            "al": {str(q): 1 for q in primes},
            "ap": ap,
            "qexp": basis,
            "prec": prec,
        })
    out.sort(key=ap_key)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", required=True, help="file with lines '<level> <prec>'")
    ap.add_argument("--out", required=True)
    ap.add_argument("--force", action="store_true")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    todo = []
    for line in open(args.levels):
        if line.strip():
            lv, pr = map(int, line.split())
            todo.append((lv, pr))
    for level, prec in todo:
        path = os.path.join(args.out, f"N={level}.jsonl")
        if os.path.exists(path) and not args.force:
            continue
        t = time.time()
        recs = orbit_records(level, prec)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            for r in recs:
                fh.write(json.dumps(r, separators=(",", ":")) + "\n")
        os.replace(tmp, path)
        print(f"{level}: {[r['dim'] for r in recs]} prec={prec} {time.time() - t:.1f}s", flush=True)


if __name__ == "__main__":
    sys.exit(main())
