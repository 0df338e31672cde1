"""Groups from generator sets: orbits, transversals, Schreier stabilizers.

A group is a list of affine generators x -> x*A + t together with an
optional known order.  Orders are never computed by Schreier-Sims; they
come from closed-form formulas attached by the constructors or from bounded
closure enumeration (`enumerate_elements`).

Orbit enumeration is a deterministic breadth-first walk (generator order,
then queue order) that records one parent pointer per element, from which
transversal words and Schreier generators for point stabilizers are
reconstructed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Callable, Iterable, Sequence

import numpy as np

from .fields import Field
from .linalg import (
    Mat,
    Vec,
    batch_mat_mul,
    identity,
    mat_inv,
    mat_mul,
    vec_add,
    vec_mat,
)

ORBIT_CAP = 1 << 25
ELEMENT_CAP = 1 << 24


class OrbitCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class AffineMap:
    """x -> x*A + t with A invertible."""

    A: Mat
    t: Vec

    @staticmethod
    def linear(A: Mat) -> "AffineMap":
        return AffineMap(A, tuple([0] * len(A)))

    @property
    def is_linear(self) -> bool:
        return not any(self.t)

    def apply(self, F: Field, v: Vec) -> Vec:
        img = vec_mat(F, v, self.A)
        return vec_add(F, img, self.t) if any(self.t) else img

    def compose(self, F: Field, other: "AffineMap") -> "AffineMap":
        """self followed by other: x -> (x*A1 + t1)*A2 + t2."""
        A = mat_mul(F, self.A, other.A)
        t = vec_add(F, vec_mat(F, self.t, other.A), other.t)
        return AffineMap(A, t)

    def inverse(self, F: Field) -> "AffineMap":
        Ai = mat_inv(F, self.A)
        ti = tuple(F.neg(x) for x in vec_mat(F, self.t, Ai))
        return AffineMap(Ai, ti)


@dataclass
class GenGroup:
    """A group given by affine generators over a fixed field and dimension."""

    field: Field
    dim: int
    gens: list[AffineMap]
    known_order: int | None = None
    name: str = ""

    def identity_map(self) -> AffineMap:
        return AffineMap.linear(identity(self.dim))

    @property
    def is_linear(self) -> bool:
        return all(g.is_linear for g in self.gens)

    def linear_parts(self) -> list[Mat]:
        return [g.A for g in self.gens]


# ---------------------------------------------------------------------------
# orbits


class Orbit:
    """BFS orbit with parent pointers.

    elements[i] is the i-th state discovered; parent[i] = (j, g) means
    elements[i] = elements[j] acted on by generator g.  The seed has
    parent (-1, -1).
    """

    def __init__(self, elements: list, index: dict, parents: list[tuple[int, int]]):
        self.elements = elements
        self.index = index
        self.parents = parents

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, state) -> bool:
        return state in self.index

    def word(self, state) -> list[int]:
        """Generator word reaching `state` from the seed."""
        i = self.index[state]
        out: list[int] = []
        while i != 0:
            j, g = self.parents[i]
            out.append(g)
            i = j
        out.reverse()
        return out

    def transversal_map(self, G: GenGroup) -> Callable[[object], AffineMap]:
        cache: dict[int, AffineMap] = {0: G.identity_map()}

        def u(state) -> AffineMap:
            i = self.index[state]
            if i in cache:
                return cache[i]
            chain = []
            j = i
            while j not in cache:
                chain.append(j)
                j = self.parents[j][0]
            for k in reversed(chain):
                pj, g = self.parents[k]
                cache[k] = cache[pj].compose(G.field, G.gens[g])
            return cache[i]

        return u


def orbit(seed, G: GenGroup, act: Callable, cap: int = ORBIT_CAP) -> Orbit:
    """Deterministic BFS orbit of `seed` under G, acting via `act(F, gen, state)`."""
    F = G.field
    elements = [seed]
    index = {seed: 0}
    parents: list[tuple[int, int]] = [(-1, -1)]
    frontier = [0]
    while frontier:
        nxt: list[int] = []
        for gi, g in enumerate(G.gens):
            for si in frontier:
                img = act(F, g, elements[si])
                if img not in index:
                    index[img] = len(elements)
                    elements.append(img)
                    parents.append((si, gi))
                    nxt.append(index[img])
                    if len(elements) > cap:
                        raise OrbitCapExceeded(f"orbit exceeded cap {cap}")
        frontier = nxt
    return Orbit(elements, index, parents)


def act_on_vectors(F: Field, g: AffineMap, v: Vec) -> Vec:
    return g.apply(F, v)


def make_subspace_action(n: int):
    """Action on canonical subspaces; linear generators only."""
    from .linalg import canonical_subspace, from_prime_coords, subspace_members

    def act(F: Field, g: AffineMap, S):
        members = subspace_members(F, S, n)
        imgs = [g.apply(F, m) for m in members]
        return canonical_subspace(F, imgs, S.sub_degree)

    return act


def act_on_sorted_sets(F: Field, g: AffineMap, pts: tuple) -> tuple:
    return tuple(sorted(g.apply(F, v) for v in pts))


def stabilizer_order(group_order: int, orbit_len: int) -> int:
    if group_order % orbit_len:
        raise ValueError(
            f"orbit length {orbit_len} does not divide group order {group_order}"
        )
    return group_order // orbit_len


def schreier_stabilizer_generators(seed, G: GenGroup, act: Callable,
                                   orb: Orbit | None = None) -> GenGroup:
    """Schreier generators u_x g u_{xg}^(-1) for the stabilizer of `seed`."""
    F = G.field
    if orb is None:
        orb = orbit(seed, G, act)
    u = orb.transversal_map(G)
    ident = G.identity_map()
    gens: list[AffineMap] = []
    seen = {ident}
    inverses: dict = {}
    for state in orb.elements:
        ux = u(state)
        for gi, g in enumerate(G.gens):
            img = act(F, g, state)
            key = img
            if key not in inverses:
                inverses[key] = u(img).inverse(F)
            s = ux.compose(F, g).compose(F, inverses[key])
            if s not in seen:
                seen.add(s)
                gens.append(s)
    order = None
    if G.known_order is not None:
        order = stabilizer_order(G.known_order, len(orb))
    return GenGroup(F, G.dim, gens or [ident], known_order=order,
                    name=f"stab({G.name})")


# ---------------------------------------------------------------------------
# element enumeration


def enumerate_elements(G: GenGroup, cap: int = ELEMENT_CAP) -> list[AffineMap]:
    """All elements by closure BFS; raises OrbitCapExceeded past `cap`.

    Uses table-driven batched matrix products when every generator is
    linear and the field is small, and updates known_order.
    """
    if G.is_linear and G.field.q <= 4096 and G.dim <= 8:
        elems = _enumerate_linear_batched(G, cap)
    else:
        elems = _enumerate_generic(G, cap)
    if G.known_order is not None and G.known_order != len(elems):
        raise ValueError(
            f"declared order {G.known_order} != enumerated {len(elems)} for {G.name}"
        )
    G.known_order = len(elems)
    return elems


def _enumerate_generic(G: GenGroup, cap: int) -> list[AffineMap]:
    F = G.field
    ident = G.identity_map()
    seen = {ident: None}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in G.gens:
            for x in frontier:
                y = x.compose(F, g)
                if y not in seen:
                    seen[y] = None
                    nxt.append(y)
                    if len(seen) > cap:
                        raise OrbitCapExceeded(f"element count exceeded cap {cap}")
        frontier = nxt
    return list(seen)


def _enumerate_linear_batched(G: GenGroup, cap: int) -> list[AffineMap]:
    F = G.field
    n = G.dim
    gens = np.array([[list(r) for r in g.A] for g in G.gens], dtype=np.uint32)
    ident = np.array([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                     dtype=np.uint32)
    seen: dict[bytes, np.ndarray] = {ident.tobytes(): ident}
    frontier = ident[None, :, :]
    while len(frontier):
        batches = []
        for gi in range(len(gens)):
            prods = batch_mat_mul(F, frontier, gens[gi])
            batches.append(prods)
        new = []
        for prods in batches:
            for k in range(len(prods)):
                key = prods[k].tobytes()
                if key not in seen:
                    seen[key] = prods[k]
                    new.append(prods[k])
                    if len(seen) > cap:
                        raise OrbitCapExceeded(f"element count exceeded cap {cap}")
        frontier = np.array(new, dtype=np.uint32) if new else np.zeros((0, n, n),
                                                                       dtype=np.uint32)
    out = []
    for arr in seen.values():
        out.append(AffineMap.linear(tuple(tuple(int(x) for x in row) for row in arr)))
    return out


def element_order(F: Field, g: AffineMap, cap: int = 1 << 16) -> int:
    ident = AffineMap.linear(identity(len(g.A)))
    cur = g
    k = 1
    while cur != ident:
        cur = cur.compose(F, g)
        k += 1
        if k > cap:
            raise OrbitCapExceeded("element order exceeded cap")
    return k


# ---------------------------------------------------------------------------
# fast vector orbits (packed representation)


def pack_vector(F: Field, v: Vec) -> int:
    out = 0
    for x in reversed(v):
        out = out * F.q + x
    return out


def unpack_vector(F: Field, code: int, n: int) -> Vec:
    out = []
    for _ in range(n):
        out.append(code % F.q)
        code //= F.q
    return tuple(out)


def apply_matrix_packed(F: Field, A: Mat, codes: np.ndarray, n: int) -> np.ndarray:
    """Apply x -> x*A to an array of base-q packed row vectors."""
    exp, log = F.np_explog()
    q = F.q
    coords = []
    rem = codes.astype(np.int64)
    for _ in range(n):
        coords.append(rem % q)
        rem //= q
    out = np.zeros_like(codes, dtype=np.int64)
    add_xor = F.p == 2
    for j in range(n):
        acc = np.zeros_like(codes, dtype=np.int64)
        for i in range(n):
            a = A[i][j]
            if not a:
                continue
            xi = coords[i]
            term = np.where(xi > 0, exp[(log[xi] + F.log(a)) % (q - 1)], 0)
            if add_xor:
                acc ^= term
            else:
                mul_t, add_t = F.np_tables()
                acc = add_t[acc, term]
        out += acc * q**j
    return out


def orbit_vectors_packed(F: Field, mats: Sequence[Mat], seed: Vec,
                         cap: int = ORBIT_CAP) -> np.ndarray:
    """Orbit of one vector under linear maps, as a sorted packed-code array."""
    n = len(seed)
    seen: set[int] = {pack_vector(F, seed)}
    frontier = np.array([pack_vector(F, seed)], dtype=np.int64)
    while len(frontier):
        new_codes = []
        for A in mats:
            imgs = apply_matrix_packed(F, A, frontier, n)
            for c in imgs.tolist():
                if c not in seen:
                    seen.add(c)
                    new_codes.append(c)
                    if len(seen) > cap:
                        raise OrbitCapExceeded("vector orbit exceeded cap")
        frontier = np.array(new_codes, dtype=np.int64)
    return np.array(sorted(seen), dtype=np.int64)
