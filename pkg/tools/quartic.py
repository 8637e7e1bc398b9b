"""Offline fixture tooling: find 3-dim sums of newform orbits with a plane-quartic relation.

Run with a Python that has cypari2.  Output: JSON with per-level orbit data
(LMFDB-style ordering: dimension, then trace vector) and candidate genus-3 compositions.
"""
import itertools, json, sys
import cypari2

pari = cypari2.Pari()
pari.default("parisizemax", 8 * 10**9)
pari("orbbasis(c, f) = my(d = poldegree(f)); if (d <= 0, [c], vector(d, k, vector(#c, n, trace(Mod(lift(c[n]) * y^(k-1), f)))))")
pari("relcount(B, deg) = my(nt = #B[1], S = vector(#B, i, Ser(B[i], q, nt)), M = List()); forvec(e = vector(#B, i, [0, deg]), if (vecsum(e) == deg, my(m = prod(i = 1, #B, S[i]^e[i])); listput(M, vector(nt, n, polcoef(m, n-1, q))))); #matker(Mat(vector(#M, j, M[j]~)))")


def level_data(N, want_al=True):
    idx = N
    for p in pari(f"factor({N})[,1]~"):
        idx = idx * (int(p) + 1) // int(p)
    nt = max((8 * idx) // 12 + 20, 120)
    pari(f"mf=mfinit([{N},2],0); L=mfeigenbasis(mf); F=mffields(mf)")
    n = int(pari("#L"))
    primes = [int(p) for p in pari(f"factor({N})[,1]~")]
    orbs = []
    for i in range(1, n + 1):
        f = pari(f"F[{i}]")
        d = max(int(pari(f"poldegree(F[{i}])")), 1)
        pari(f"c{i}=mfcoefs(L[{i}],{nt}); B{i}=orbbasis(c{i},F[{i}])")
        traces = [int(t) for t in pari(f"vector(101,n,if(poldegree(F[{i}])>0,trace(Mod(lift(c{i}[n]),F[{i}])),c{i}[n]))")]
        orbs.append({"i": i, "dim": d, "poly": str(f), "traces": traces})
    if want_al:
        for p in primes:
            e = int(pari(f"valuation({N},{p})"))
            if e != 1:
                continue
            ev = pari(f"mfatkineigenvalues(mf,{p})")
            for o in orbs:
                vals = {str(x) for x in ev[o["i"] - 1]}
                assert len(vals) == 1, vals
                o.setdefault("al", {})[p] = int(vals.pop())
    orbs.sort(key=lambda o: (o["dim"], o["traces"]))
    for k, o in enumerate(orbs):
        o["letter"] = chr(ord("a") + k) if k < 26 else None
    curves = []
    small = [o for o in orbs if o["dim"] <= 3]
    for r in (1, 2, 3):
        for combo in itertools.combinations(small, r):
            if sum(o["dim"] for o in combo) != 3:
                continue
            rows = "concat([" + ",".join(f"B{o['i']}" for o in combo) + "])"
            pari(f"BB={rows}")
            conic = int(pari("relcount(BB,2)"))
            quart = int(pari("relcount(BB,4)"))
            curves.append({"orbits": [o["letter"] for o in combo], "conic": conic, "quartic": quart})
    for o in orbs:
        o.pop("i")
        o["traces"] = o["traces"][:30]
    return {"level": N, "coeffs_used": nt, "orbits": orbs, "combos": curves}


if __name__ == "__main__":
    out = [level_data(int(a)) for a in sys.argv[1:]]
    with open(sys.stdout.fileno(), "w", closefd=False) as fh:
        json.dump(out, fh)
