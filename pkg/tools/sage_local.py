"""Offline fixture tooling: local components at p with p^2 | N, via Sage.

Usage: sage-python sage_local.py N level_N.json LETTERS

Newforms are matched to the LMFDB-ordered orbits of quartic.py output by their
trace vectors a_1..a_29.  For each requested orbit and each p with p^2 | N the
output records the species reported by Sage's LocalComponent.  For depth-zero
supercuspidals (conductor p^2) it also records, for every complex embedding of
the Hecke field, the character theta of the unramified quadratic extension on
the generator s of its residue units, written as exp(2 pi i k / order), and the
order of theta restricted to Z_p^x.  For supercuspidals induced from a ramified
quadratic extension it records the extension and, per embedding, the order of
theta on each unit generator and on the uniformiser.
"""
import cmath
import json
import sys

from sage.all__sagemath_schemes import CC, Newforms, factor
from sage.modular.local_comp.local_comp import LocalComponent


def traces(f, n=30):
    K = f.hecke_eigenvalue_field()
    return [int(f[k].trace()) if K.degree() > 1 else int(f[k]) for k in range(1, n)]


def root_of_unity(z, bound=240):
    """(k, n) with z = exp(2 pi i k / n), n minimal; None if not a root of unity."""
    ang = cmath.phase(complex(z)) / (2 * cmath.pi)
    if abs(abs(complex(z)) - 1) > 1e-9:
        return None
    for n in range(1, bound + 1):
        k = round(ang * n) % n
        if abs(ang * n - round(ang * n)) < 1e-9:
            return k, n
    return None


def depth_zero_data(f, pi, p):
    chars = pi.characters()
    theta = chars[0]
    G = theta.parent()
    s, unif = G.unit_gens(theta.level())[:2]
    K = theta.base_ring()
    val_s = theta(s)
    val_p = theta(unif)
    hecke = [f[n] for n in (2, 3, 5, 7, 11, 13) if n % p]
    rows = []
    for phi in K.embeddings(CC):
        key = []
        for a in hecke:
            try:
                key.append(complex(phi(K(a))).real)
            except TypeError:
                key = None
                break
        k, n = root_of_unity(phi(val_s))
        # theta on Z_p^x is determined by theta(s^(p+1)), s^(p+1) being a generator of F_p^x
        kk, nn = root_of_unity(phi(val_s) ** (p + 1))
        rows.append({
            "hecke_key": None if key is None else [round(x, 8) for x in key],
            "theta_s": [k, n],
            "theta_on_Zp_order": nn,
            "theta_unif": str(val_p),
        })
    return {
        "char_field": str(K.defining_polynomial()) if hasattr(K, "defining_polynomial") else str(K),
        "extension": str(G.number_field().defining_polynomial()),
        "theta_s_exact": str(val_s),
        "embeddings": rows,
    }


def ramified_data(pi):
    theta = pi.characters()[0]
    G = theta.parent()
    K = theta.base_ring()
    gens = list(G.unit_gens(theta.level()))
    rows = []
    for phi in K.embeddings(CC):
        rows.append([root_of_unity(phi(theta(g)))[1] for g in gens])
    return {
        "extension": str(G.number_field().defining_polynomial()),
        "generators": [str(g) for g in gens],
        "orders": rows,
    }


def run(N, orbit_file, letters):
    ref = json.load(open(orbit_file))[0]
    by_tr = {tuple(o["traces"][1:30]): o["letter"] for o in ref["orbits"]}
    res = {}
    for f in Newforms(N, names="a"):
        letter = by_tr[tuple(traces(f))]
        if letter not in letters:
            continue
        info = {}
        for p, e in factor(N):
            if e < 2:
                continue
            pi = LocalComponent(f, p)
            d = {"species": pi.species(), "conductor": int(pi.conductor()), "repr": str(pi)}
            if pi.species() == "Supercuspidal":
                d["characters"] = str(pi.characters())
                if int(pi.conductor()) == 2:
                    d["depth_zero"] = depth_zero_data(f, pi, int(p))
                elif "ramified extension" in d["characters"] and "unramified" not in d["characters"]:
                    d["ramified"] = ramified_data(pi)
            elif pi.species() == "Principal Series":
                d["characters"] = str(pi.characters())
            info[int(p)] = d
        res[letter] = info
    return res


if __name__ == "__main__":
    N = int(sys.argv[1])
    out = run(N, sys.argv[2], set(sys.argv[3]))
    with open(sys.stdout.fileno(), "w", closefd=False) as fh:
        json.dump(out, fh, indent=1)
