"""Incidence structures on V = GF(q)^n and their verification.

Points are indexed by packing coordinates base-q, least significant first,
which coincides with the lexicographic order of prime-field coordinate
tuples in the fixed polynomial basis.  Blocks are stored as sorted tuples
of point indices.

A design built from an affine group T:G0 and a base block through 0 is
determined by its through-0 slice: the blocks through 0 are the translates
{C + t : C in B^G0, t in C}, and the full block set is the translation
closure of that slice.  Pair-coverage verification therefore comes in two
modes: `bruteforce` counts every pair over the explicit block set, while
`orbitwise` counts the blocks through {0, y} for one representative y per
G0-orbit on nonzero vectors, which suffices because the translation group
is point-transitive and pair counts are constant on G0-orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .fields import Field
from .linalg import canonical_subspace, vec_add, Vec
from .orbits import AffineMap, GenGroup, orbit

BRUTEFORCE_PAIR_CAP = 10**8


class DesignError(ValueError):
    pass


def point_index(F: Field, v: Vec) -> int:
    out = 0
    for x in reversed(v):
        out = out * F.q + x
    return out


def point_unindex(F: Field, code: int, n: int) -> Vec:
    out = []
    for _ in range(n):
        out.append(code % F.q)
        code //= F.q
    return tuple(out)


def translate_code(F: Field, code: int, tcode: int, n: int) -> int:
    if F.p == 2:
        return code ^ tcode
    u = point_unindex(F, code, n)
    t = point_unindex(F, tcode, n)
    return point_index(F, vec_add(F, u, t))


@dataclass(frozen=True)
class DesignParams:
    """Parameters (v, k, lambda) with the affine identities enforced."""

    v: int
    k: int
    lam: int

    def __post_init__(self):
        if self.k**2 != self.v:
            raise DesignError(f"k^2 = {self.k ** 2} != v = {self.v}")
        if self.k % self.lam:
            raise DesignError(f"lambda = {self.lam} does not divide k = {self.k}")
        _prime_power(self.v)

    @property
    def p(self) -> int:
        return _prime_power(self.v)[0]

    @property
    def m(self) -> int:
        return _prime_power(self.v)[1] // 2

    @property
    def r(self) -> int:
        return self.lam * (self.p**self.m + 1)

    @property
    def b(self) -> int:
        return self.v * self.r // self.k

    def f_exponent(self) -> int:
        p, f, lam = self.p, 0, self.lam
        while lam > 1:
            if lam % p:
                raise DesignError("lambda is not a power of p")
            lam //= p
            f += 1
        return f


def _prime_power(n: int) -> tuple[int, int]:
    for p in range(2, 1 << 10):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if n != 1:
                raise DesignError("not a prime power")
            return p, e
    raise DesignError("not a prime power")


@dataclass
class Design:
    """A block design on all of V, possibly held as its through-0 slice."""

    field: Field
    n: int
    k: int
    blocks_through_zero: tuple[tuple[int, ...], ...]
    base_block: tuple[int, ...]
    group_name: str = ""
    explicit_blocks: tuple[tuple[int, ...], ...] | None = None

    @property
    def v(self) -> int:
        return self.field.q**self.n

    @property
    def r(self) -> int:
        return len(self.blocks_through_zero)

    @property
    def b(self) -> int:
        if self.explicit_blocks is not None:
            return len(self.explicit_blocks)
        return self.v * self.r // self.k

    def params(self) -> DesignParams:
        num = self.r * (self.k - 1)
        if num % (self.v - 1):
            raise DesignError("replication count does not define an integer lambda")
        return DesignParams(self.v, self.k, num // (self.v - 1))

    def materialize(self, cap: int = 1 << 22) -> tuple[tuple[int, ...], ...]:
        """The full block set as translation closure of the through-0 slice."""
        if self.explicit_blocks is not None:
            return self.explicit_blocks
        if self.b * self.k > cap:
            raise DesignError(f"materializing {self.b} blocks exceeds cap")
        F = self.field
        out: set[tuple[int, ...]] = set()
        for C in self.blocks_through_zero:
            for t in range(self.v):
                out.add(tuple(sorted(translate_code(F, c, t, self.n) for c in C)))
        self.explicit_blocks = tuple(sorted(out))
        return self.explicit_blocks

    def to_json_dict(self, include_blocks: bool = True) -> dict:
        params = self.params()
        out = {
            "params": {"v": params.v, "k": params.k, "lambda": params.lam,
                       "r": params.r, "b": params.b},
            "base_block": list(self.base_block),
            "group": self.group_name,
        }
        if include_blocks:
            out["blocks_through_zero"] = [list(C) for C in self.blocks_through_zero]
        return out


# ---------------------------------------------------------------------------
# construction


def point_permutations(F: Field, G: GenGroup) -> list[np.ndarray]:
    """Per-generator permutations of packed point codes (linear groups)."""
    v = F.q**G.dim
    if v > 1 << 16:
        raise DesignError("point permutation tables capped at 2^16 points")
    n = G.dim
    pts = [point_unindex(F, c, n) for c in range(v)]
    out = []
    for g in G.gens:
        arr = np.empty(v, dtype=np.int64)
        for c, pt in enumerate(pts):
            arr[c] = point_index(F, g.apply(F, pt))
        out.append(arr)
    return out


def block_orbit_codes(F: Field, G0: GenGroup, base_codes: Sequence[int],
                      cap_blocks: int = 1 << 20,
                      perms: list[np.ndarray] | None = None) -> list[tuple[int, ...]]:
    """Orbit of a point-code set under the linear group, as sorted tuples."""
    if perms is None:
        perms = point_permutations(F, G0)
    seed = tuple(sorted(base_codes))
    seen = {seed}
    frontier = [np.array(seed, dtype=np.int64)]
    while frontier:
        nxt = []
        for arr in frontier:
            for p in perms:
                img = np.sort(p[arr])
                key = tuple(img.tolist())
                if key not in seen:
                    seen.add(key)
                    nxt.append(img)
                    if len(seen) > cap_blocks:
                        raise DesignError("block orbit exceeded cap")
        frontier = nxt
    return sorted(seen)


def through_zero_blocks(F: Field, G0: GenGroup, base_codes: Sequence[int],
                        n: int, perms: list[np.ndarray] | None = None,
                        cap_blocks: int = 1 << 20) -> list[tuple[int, ...]]:
    """All blocks through 0 of the design (V, base^(T:G0))."""
    orb = block_orbit_codes(F, G0, base_codes, cap_blocks=cap_blocks, perms=perms)
    out: set[tuple[int, ...]] = set()
    for C in orb:
        for t in C:
            out.add(tuple(sorted(translate_code(F, c, t, n) for c in C)))
    return sorted(out)


def design_from_group(F: Field, G0: GenGroup, base_points: Iterable[Vec],
                      name: str = "") -> Design:
    """The design with point set V and blocks the T:G0-orbit of the base."""
    n = G0.dim
    base_codes = sorted(point_index(F, v) for v in base_points)
    if base_codes[0] != 0:
        raise DesignError("base block must contain the zero vector")
    tz = through_zero_blocks(F, G0, base_codes, n)
    return Design(F, n, len(base_codes), tuple(tz), tuple(base_codes),
                  name or G0.name)


def build_design(base_points: Iterable[Vec], G: GenGroup, name: str = "") -> Design:
    """Direct orbit construction under an arbitrary affine group."""
    F = G.field
    n = G.dim
    base = tuple(sorted(base_points))
    zero = tuple([0] * n)
    if zero not in base:
        raise DesignError("base block must contain the zero vector")
    k = len(base)
    kk = k
    while kk % F.p == 0 and kk > 1:
        kk //= F.p
    if kk != 1:
        raise DesignError("block size must be a power of the characteristic")

    def act(F_, g, pts):
        return tuple(sorted(g.apply(F_, v) for v in pts))

    orb = orbit(base, G, act)
    blocks = []
    tz = []
    for pts in orb.elements:
        codes = tuple(sorted(point_index(F, v) for v in pts))
        blocks.append(codes)
        if codes[0] == 0:
            tz.append(codes)
    base_codes = tuple(sorted(point_index(F, v) for v in base))
    return Design(F, n, k, tuple(sorted(tz)), base_codes, name or G.name,
                  explicit_blocks=tuple(sorted(blocks)))


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerifyResult:
    ok: bool
    lam: int | None
    witness: tuple | None = None
    detail: str = ""


def verify_2design(D: Design, mode: str = "orbitwise",
                   G0: GenGroup | None = None) -> VerifyResult:
    if mode == "bruteforce":
        return _verify_bruteforce(D)
    if mode == "orbitwise":
        if G0 is None:
            raise DesignError("orbitwise verification needs the linear group")
        return _verify_orbitwise(D, G0)
    raise DesignError(f"unknown mode {mode!r}")


def _verify_bruteforce(D: Design) -> VerifyResult:
    if D.b * D.k * D.k > BRUTEFORCE_PAIR_CAP:
        raise DesignError("bruteforce pair count too large; use orbitwise")
    blocks = D.materialize()
    v = D.v
    counts = np.zeros(v * v, dtype=np.int64)
    for C in blocks:
        arr = np.array(C, dtype=np.int64)
        pairs = arr[:, None] * v + arr[None, :]
        counts += np.bincount(pairs.ravel(), minlength=v * v)
    grid = counts.reshape(v, v)
    upper = grid[np.triu_indices(v, k=1)]
    lam = int(upper[0])
    if not np.all(upper == lam):
        flat = int(np.argmin(upper == lam))
        x, y = np.triu_indices(v, k=1)
        return VerifyResult(False, None,
                            witness=(int(x[flat]), int(y[flat]),
                                     int(upper[flat]), lam),
                            detail="nonuniform pair coverage")
    return VerifyResult(True, lam)


def _verify_orbitwise(D: Design, G0: GenGroup) -> VerifyResult:
    F = D.field
    v = D.v
    counts = np.zeros(v, dtype=np.int64)
    for C in D.blocks_through_zero:
        counts[np.array(C, dtype=np.int64)] += 1
    lam = None
    for codes in point_orbits(F, G0):
        c = int(counts[codes[0]])
        if lam is None:
            lam = c
        if any(int(counts[x]) != lam for x in codes):
            bad = next(x for x in codes if int(counts[x]) != lam)
            return VerifyResult(False, None,
                                witness=(0, bad, int(counts[bad]), lam),
                                detail="pair coverage not constant")
    return VerifyResult(True, lam)


def point_orbits(F: Field, G0: GenGroup) -> list[list[int]]:
    """G0-orbits on nonzero points, as lists of packed codes."""
    v = F.q**G0.dim
    n = G0.dim
    seen = np.zeros(v, dtype=bool)
    seen[0] = True
    out = []
    for code in range(1, v):
        if seen[code]:
            continue
        orb = orbit(point_unindex(F, code, n), G0,
                    lambda F_, g, x: g.apply(F_, x))
        codes = [point_index(F, x) for x in orb.elements]
        for c in codes:
            seen[c] = True
        out.append(codes)
    return out


def check_flag_transitive(D: Design, G0: GenGroup) -> bool:
    """Whether T:G0 is transitive on incident (point, block) pairs."""
    return flag_orbit_size(D, G0) == D.b * D.k


def flag_orbit_size(D: Design, G0: GenGroup) -> int:
    """Size of the orbit of the flag (0, base block) under T:G0.

    Computed as b times the orbit of 0 under the affine block stabilizer,
    whose generators come from Schreier elements of the block-class orbit.
    """
    F = D.field
    n = D.n
    base = D.blocks_through_zero[0]
    stab_maps = block_stabilizer_affine(F, G0, base, n)
    pts = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for c in frontier:
            for amap in stab_maps:
                img = point_index(F, amap.apply(F, point_unindex(F, c, n)))
                if img not in pts:
                    pts.add(img)
                    nxt.append(img)
        frontier = nxt
    return D.b * len(pts)


def block_stabilizer_affine(F: Field, G0: GenGroup, base: tuple[int, ...],
                            n: int) -> list[AffineMap]:
    """Generators of the stabilizer of the base block inside T:G0."""
    tcodes = translation_stabilizer_codes(F, base, n)
    is_subspace = len(tcodes) == len(base)

    def canon_class(codes) -> tuple[int, ...]:
        codes = tuple(sorted(codes))
        if is_subspace:
            return codes
        best = codes
        for t in codes:
            cand = tuple(sorted(translate_code(F, c, t, n) for c in codes))
            if cand < best:
                best = cand
        return best

    def act(F_, g, cls):
        return canon_class(point_index(F_, g.apply(F_, point_unindex(F_, c, n)))
                           for c in cls)

    seed = canon_class(base)
    orb = orbit(seed, G0, act)
    u = orb.transversal_map(G0)
    inv_cache: dict = {}
    base_set = frozenset(base)
    out: list[AffineMap] = []
    seen_linear = set()
    for state in orb.elements:
        ux = u(state)
        for g in G0.gens:
            img = act(F, g, state)
            if img not in inv_cache:
                inv_cache[img] = u(img).inverse(F)
            s = ux.compose(F, g).compose(F, inv_cache[img])
            if s in seen_linear:
                continue
            seen_linear.add(s)
            img_codes = [point_index(F, s.apply(F, point_unindex(F, c, n)))
                         for c in base]
            for t in base:
                if frozenset(translate_code(F, c, t, n)
                             for c in img_codes) == base_set:
                    out.append(AffineMap(s.A, vec_add(F, s.t,
                                                      point_unindex(F, t, n))))
                    break
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    for t in tcodes:
        out.append(AffineMap(ident, point_unindex(F, t, n)))
    return out


def translation_stabilizer_codes(F: Field, block: Sequence[int], n: int) -> list[int]:
    """Translation codes t with block + t = block (t ranges inside block)."""
    bs = frozenset(block)
    out = []
    for t in block:
        if all(translate_code(F, c, t, n) in bs for c in block):
            out.append(t)
    return sorted(set(out))


def translation_block_stabilizer(D: Design, block: Sequence[int]) -> int:
    """t = log_p |T_B|, with the window m - t <= f <= m asserted."""
    F = D.field
    size = len(translation_stabilizer_codes(F, block, D.n))
    p = F.p
    t = 0
    while p**t < size:
        t += 1
    if p**t != size:
        raise DesignError(f"|T_B| = {size} is not a power of {p}")
    params = D.params()
    f = params.f_exponent()
    m = params.m
    if not (m - t <= f <= m):
        raise DesignError(f"translation stabilizer bound violated: "
                          f"m={m}, t={t}, f={f}")
    return t


def blocks_are_subspaces(D: Design) -> tuple[bool, int]:
    """(all through-0 blocks are GF(p^d)-subspaces, the largest common d)."""
    F = D.field
    n = D.n
    best = None
    for C in D.blocks_through_zero:
        vecs = [point_unindex(F, c, n) for c in C]
        S = canonical_subspace(F, vecs, 1)
        if S.size != len(C):
            return False, 0
        d = 1
        for dd in range(F.h, 0, -1):
            if F.h % dd:
                continue
            if canonical_subspace(F, vecs, dd).size == len(C):
                d = dd
                break
        best = d if best is None else min(best, d)
    return True, best or 1


def tactical_counts(D: Design, G0: GenGroup) -> list[tuple[int, int]]:
    """(orbit length, base-block intersection) per G0-orbit on V*.

    Asserts orbit length = (p^m + 1) * intersection for every orbit.
    """
    F = D.field
    base = set(D.blocks_through_zero[0])
    pm1 = D.params().p ** D.params().m + 1
    out = []
    for codes in point_orbits(F, G0):
        inter = len(set(codes) & base)
        if len(codes) != pm1 * inter:
            raise DesignError(
                f"tactical ratio violated: orbit {len(codes)} != "
                f"{pm1} * {inter}"
            )
        out.append((len(codes), inter))
    return out


def r_three_ways(D: Design) -> tuple[int, int, int]:
    """r as the through-0 count, as lambda*(p^m+1), and as b*k/v."""
    params = D.params()
    return (D.r, params.lam * (params.p**params.m + 1), D.b * D.k // D.v)


# ---------------------------------------------------------------------------
# base-block search on small spaces


def base_block_search(G0: GenGroup, k: int, lam_target: int,
                      include_cyclic: bool = True) -> list[Design]:
    """Flag-transitive 2-(v, k, lam) designs under T:G0 on a small space.

    Candidates are every GF(p)-subspace of size k through 0, plus, when
    include_cyclic is set, every {0} u (union of point orbits) of a cyclic
    subgroup of odd prime order.  Any base block of a flag-transitive
    design with these parameters is invariant under such a subgroup or is
    a subspace, so the scan is exhaustive.  Candidates whose G0-orbit
    exceeds the replication number are discarded early; survivors are
    verified and deduplicated by block set.
    """
    F = G0.field
    n = G0.dim
    v = F.q**n
    if v > 1 << 12:
        raise DesignError("base block search capped at 2^12 points")
    r_target = lam_target * (math.isqrt(v) + 1)
    perms = point_permutations(F, G0)
    candidates: set[tuple[int, ...]] = set()
    d = 0
    while F.p**d < k:
        d += 1
    if F.p**d == k and F.h == 1:
        candidates.update(_all_subspaces_of_dim(F, n, d))
    if include_cyclic:
        for orbits in _odd_cyclic_orbit_partitions(F, G0):
            _assemble_candidates(orbits, k, candidates)
    seen_blocks: set[tuple[int, ...]] = set()
    designs: dict[frozenset, Design] = {}
    for cand in sorted(candidates):
        if cand in seen_blocks:
            continue
        try:
            orb = block_orbit_codes(F, G0, cand, cap_blocks=r_target, perms=perms)
        except DesignError:
            continue
        seen_blocks.update(orb)
        tz: set[tuple[int, ...]] = set()
        for C in orb:
            for t in C:
                tz.add(tuple(sorted(translate_code(F, c, t, n) for c in C)))
        if len(tz) != r_target:
            continue
        D = Design(F, n, k, tuple(sorted(tz)), cand, G0.name)
        res = verify_2design(D, "orbitwise", G0)
        if not (res.ok and res.lam == lam_target):
            continue
        if not check_flag_transitive(D, G0):
            continue
        designs.setdefault(frozenset(D.blocks_through_zero), D)
    return sorted(designs.values(), key=lambda D: D.blocks_through_zero)


@lru_cache(maxsize=8)
def _all_subspaces_of_dim(F: Field, n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """All d-dimensional GF(p)-subspaces of V_n(p), as sorted code tuples.

    Enumerated cell by cell from the possible reduced-echelon shapes.
    """
    if F.h != 1:
        raise DesignError("subspace candidate scan assumes a prime field")
    from itertools import combinations, product as iproduct

    p = F.p
    out = []
    for pivots in combinations(range(n), d):
        free_pos = []
        for i, pv in enumerate(pivots):
            for j in range(pv + 1, n):
                if j not in pivots:
                    free_pos.append((i, j))
        for fill in iproduct(range(p), repeat=len(free_pos)):
            rows = [[0] * n for _ in range(d)]
            for i, pv in enumerate(pivots):
                rows[i][pv] = 1
            for (i, j), val in zip(free_pos, fill):
                rows[i][j] = val
            span = {0}
            for row in rows:
                scaled = [point_index(F, tuple((mult * x) % p for x in row))
                          for mult in range(1, p)]
                span |= {translate_code(F, c, s, n) for c in span for s in scaled}
            out.append(tuple(sorted(span)))
    return tuple(sorted(out))


def _odd_cyclic_orbit_partitions(F: Field, G0: GenGroup):
    """Point-orbit lists for one generator per odd-prime-order subgroup."""
    from .orbits import enumerate_elements

    elems = enumerate_elements(G0)
    n = G0.dim
    v = F.q**n
    ident = G0.identity_map()
    seen_subgroups: set[frozenset] = set()
    for g in elems:
        k = 1
        cur = g
        while cur != ident and k <= 64:
            cur = cur.compose(F, g)
            k += 1
        if k > 64 or k == 1 or k % 2 == 0 or not _is_prime_small(k):
            continue
        members = frozenset(_powers(F, g, k))
        if members in seen_subgroups:
            continue
        seen_subgroups.add(members)
        assigned = [False] * v
        assigned[0] = True
        orbits = []
        for code in range(1, v):
            if assigned[code]:
                continue
            cur_code = code
            orb = []
            while not assigned[cur_code]:
                assigned[cur_code] = True
                orb.append(cur_code)
                pt = point_unindex(F, cur_code, n)
                cur_code = point_index(F, g.apply(F, pt))
            orbits.append(tuple(orb))
        yield orbits


def _powers(F: Field, g: AffineMap, order: int) -> list[AffineMap]:
    cur = g
    out = [g]
    for _ in range(order - 1):
        cur = cur.compose(F, g)
        out.append(cur)
    return out


def _is_prime_small(k: int) -> bool:
    return k > 1 and all(k % d for d in range(2, int(k**0.5) + 1))


def _assemble_candidates(orbits: Sequence[tuple[int, ...]], k: int,
                         out: set[tuple[int, ...]], cap: int = 200000) -> None:
    """All {0} u (union of orbits) sets of size k, appended to `out`."""
    sizes = [len(o) for o in orbits]
    n = len(orbits)
    count = 0

    def rec(i: int, remaining: int, chosen: list[int]):
        nonlocal count
        if remaining == 0:
            pts = [0]
            for j in chosen:
                pts.extend(orbits[j])
            out.add(tuple(sorted(pts)))
            count += 1
            return
        if i >= n or count > cap:
            return
        if sizes[i] <= remaining:
            chosen.append(i)
            rec(i + 1, remaining - sizes[i], chosen)
            chosen.pop()
        rec(i + 1, remaining, chosen)

    rec(0, k - 1, [])
