"""Offline fixture tooling: Atkin-Lehner eigenvalues at p^e || N with e >= 2.

Usage: python al_prime_power.py N level_N.json > al_N.json

Orbits are matched to the LMFDB letters of quartic.py output by their traces.
"""
import json
import sys

import cypari2

pari = cypari2.Pari()
pari.default("parisizemax", 8 * 10**9)


def run(N, orbit_file):
    ref = json.load(open(orbit_file))[0]
    by_tr = {tuple(o["traces"][:30]): o["letter"] for o in ref["orbits"]}
    pari(f"mf=mfinit([{N},2],0); L=mfeigenbasis(mf); F=mffields(mf)")
    fac = [(int(p), int(e)) for p, e in zip(pari(f"factor({N})[,1]~"), pari(f"factor({N})[,2]~"))]
    out = {}
    for p, e in fac:
        if e < 2:
            continue
        ev = pari(f"mfatkineigenvalues(mf,{p ** e})")
        for i in range(int(pari("#L"))):
            tr = tuple(int(t) for t in pari(
                f"vector(30,n,my(c=mfcoefs(L[{i + 1}],29)[n]);if(poldegree(F[{i + 1}])>0,trace(Mod(lift(c),F[{i + 1}])),c))"))
            vals = {str(x) for x in ev[i]}
            assert len(vals) == 1, vals
            out.setdefault(by_tr[tr], {})[str(p)] = int(vals.pop())
    return dict(sorted(out.items()))


if __name__ == "__main__":
    json.dump(run(int(sys.argv[1]), sys.argv[2]), sys.stdout, indent=1, sort_keys=True)
    print()
