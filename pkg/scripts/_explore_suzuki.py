import sys, time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
from itertools import product
import numpy as np
from flagdesigns.fields import make_field
from flagdesigns.orbits import *
from flagdesigns.linalg import vec_mat
from flagdesigns.atlas import sz, suzuki_torus

F = make_field(2, 3)
q = 8
s = F.suzuki_sigma
G = sz(8)

def pack(v): return v[0] + 8 * v[1] + 64 * v[2] + 512 * v[3]
def unpack(c): return (c % 8, (c // 8) % 8, (c // 64) % 8, (c // 512) % 8)

perms = []
for g in G.gens:
    arr = np.zeros(4096, dtype=np.int64)
    for c in range(4096):
        arr[c] = pack(vec_mat(F, unpack(c), g.A))
    perms.append(arr)

def Nlw(l, w):
    return F.add(F.add(F.mul(F.mul(l, l), s(l)), F.mul(l, w)), s(w))

ovoid = set()
for c in range(1, q):
    ovoid.add(pack((c, 0, 0, 0))); ovoid.add(pack((0, 0, 0, c)))
for l, w in product(range(q), repeat=2):
    if (l, w) == (0, 0): continue
    base = (Nlw(l, w), w, l, 1)
    for c in range(1, q):
        ovoid.add(pack(tuple(F.mul(c, x) for x in base)))

def sig_pow(m, units, sigmas):
    if m == 0: return 0
    return F.pow(m, units + sigmas * (1 << (F.suzuki_e + 1)))

def family_block(x0, y0, z0, t0):
    if (y0 == 0 and t0 == 0) or (x0 == 0 and z0 == 0):
        out = set()
        for m1 in range(q):
            a = F.mul(sig_pow(m1, 2, 1), x0); b = F.mul(sig_pow(m1, 0, 1), y0)
            for m2 in range(q):
                c = F.mul(sig_pow(m2, 0, -1), z0); d = F.mul(sig_pow(m2, -2, -1), t0)
                out.add(pack((a, b, c, d)))
        return out
    out = set()
    for m1 in range(q):
        a = F.mul(sig_pow(m1, 2, 1), x0); c = F.mul(sig_pow(m1, 0, -1), z0)
        for m2 in range(q):
            b = F.mul(sig_pow(m2, 0, 1), y0); d = F.mul(sig_pow(m2, -2, -1), t0)
            out.add(pack((a, b, c, d)))
    return out

def gf2_closed(S):
    L = sorted(S)
    SS = set(S)
    return all((a ^ b) in SS for a in L for b in L)  # pack is GF(2)-linear here

def block_orbit_and_lambda(blk):
    seed = tuple(sorted(blk))
    seen = {seed}
    frontier = [np.array(seed, dtype=np.int64)]
    count = np.zeros(4096, dtype=np.int64)
    count[np.array(seed)] += 1
    while frontier:
        nxt = []
        for arr in frontier:
            for p in perms:
                img = np.sort(p[arr])
                key = tuple(img.tolist())
                if key not in seen:
                    seen.add(key)
                    nxt.append(img)
                    count[img] += 1
        frontier = nxt
    lam = set(count[1:].tolist())
    return len(seen), (lam.pop() if len(lam) == 1 else None)

def zeta_fixed_points(x0, y0, z0, t0):
    a = s(F.mul(y0, F.inv(t0)))
    zt = F.mul(z0, F.inv(t0))
    b = F.mul(F.mul(zt, zt), s(zt))
    c = F.mul(x0, F.inv(t0))
    d = F.mul(zt, F.mul(y0, F.inv(t0)))
    n = 0
    for X in range(1, q):
        Xs = s(X)
        den = F.add(F.mul(c, Xs), d)
        if den == 0:
            continue
        num = F.add(F.mul(a, Xs), b)
        if F.mul(num, F.inv(den)) == X:
            n += 1
    return n

def classify(x0, y0, z0, t0):
    if (y0 == 0 and t0 == 0) or (x0 == 0 and z0 == 0):
        return "F1"
    if not (x0 and y0 and z0 and t0):
        return "NotABlock"
    lhs = F.mul(t0, F.mul(y0, s(y0)))        # t0 * y0^(sigma+1)
    rhs = F.mul(x0, F.mul(z0, s(z0)))        # x0 * z0^(sigma+1)
    if lhs == rhs:
        return "F2" if (z0, t0) == (y0, x0) else "F3"
    return "F4" if zeta_fixed_points(x0, y0, z0, t0) == 1 else "NotABlock"

t0_ = time.time()
for tup, expect_lam in [((1, 0, 1, 0), 8), ((1, 1, 1, 1), 32),
                        ((1, 1, F.w, F.pow(F.w, 5)), 64)]:
    blk = family_block(*tup)
    fam = classify(*tup)
    n_blocks, lam = block_orbit_and_lambda(blk)
    bo = len(blk & ovoid)
    print(f"tuple {tup}: family {fam}, closed {gf2_closed(blk)}, "
          f"through-0 blocks {n_blocks}, lambda {lam}, |B∩O| {bo}")

# exhaustive IntOrb cross-validation over all-nonzero tuples with x0 = 1
mismatch = 0
fam_counts = {}
f4_witnesses = []
for y0 in range(1, q):
    for z0 in range(1, q):
        for t0 in range(1, q):
            tup = (1, y0, z0, t0)
            blk = family_block(*tup)
            bo = len(blk & ovoid)
            fam = classify(*tup)
            cond = fam in ("F2", "F3", "F4")
            if (bo == q - 1) != cond:
                mismatch += 1
                if mismatch < 8:
                    print("MISMATCH", tup, "family", fam, "|B∩O|", bo,
                          "zeta", zeta_fixed_points(*tup))
            fam_counts[fam] = fam_counts.get(fam, 0) + 1
            if fam == "F4":
                f4_witnesses.append(tup)
print("mismatches:", mismatch, "family counts:", fam_counts)
print("first F4 witnesses:", f4_witnesses[:5])
if f4_witnesses:
    blk = family_block(*f4_witnesses[0])
    nb, lam = block_orbit_and_lambda(blk)
    print("F4 design: blocks", nb, "lambda", lam, "|B∩O|", len(blk & ovoid))
print(f"elapsed {time.time()-t0_:.1f}s")
