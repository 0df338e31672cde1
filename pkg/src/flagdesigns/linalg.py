"""Vectors, matrices and subspaces over GF(q) and its subfields.

Vectors are tuples of field-element indices; matrices are tuples of row
tuples and act on the right of row vectors, x -> x*A.  Subspaces are always
canonicalized at the prime-field level: the defining data is the reduced
row-echelon basis of the GF(p)-expansion, so GF(q)-subspaces and
GF(p^d)-subspaces of the same ambient space share one representation and
two spans are equal iff their canonical forms are identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .fields import Field, FieldError

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]


class LinAlgError(ValueError):
    pass


# ---------------------------------------------------------------------------
# matrix / vector arithmetic over GF(q)


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def vec_add(F: Field, u: Vec, v: Vec) -> Vec:
    return tuple(F.add(a, b) for a, b in zip(u, v))

def vec_sub(F: Field, u: Vec, v: Vec) -> Vec:
    return tuple(F.sub(a, b) for a, b in zip(u, v))

def vec_scale(F: Field, c: int, v: Vec) -> Vec:
    return tuple(F.mul(c, a) for a in v)


def vec_mat(F: Field, v: Vec, A: Mat) -> Vec:
    n = len(A[0])
    out = [0] * n
    for i, vi in enumerate(v):
        if vi:
            row = A[i]
            for j in range(n):
                a = row[j]
                if a:
                    out[j] = F.add(out[j], F.mul(vi, a))
    return tuple(out)


def mat_mul(F: Field, A: Mat, B: Mat) -> Mat:
    return tuple(vec_mat(F, row, B) for row in A)


def mat_transpose(A: Mat) -> Mat:
    return tuple(zip(*A))


def mat_apply_entrywise(F: Field, A: Mat, fn) -> Mat:
    return tuple(tuple(fn(a) for a in row) for row in A)


def mat_inv(F: Field, A: Mat) -> Mat:
    """Gauss-Jordan inverse; raises LinAlgError when singular."""
    n = len(A)
    M = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if M[i][c]), None)
        if piv is None:
            raise LinAlgError("matrix is singular")
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(n):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        r += 1
    return tuple(tuple(row[n:]) for row in M)


def is_invertible(F: Field, A: Mat) -> bool:
    try:
        mat_inv(F, A)
        return True
    except LinAlgError:
        return False


# Batched multiplication for element enumeration: stacks of matrices as a
# numpy (N, n, n) array of field indices, multiplied through q x q lookup
# tables.  Only wired up for q <= 4096, which covers every group this
# package constructs explicitly.


def batch_mat_mul(F: Field, batch: np.ndarray, B: np.ndarray) -> np.ndarray:
    mul, add = F.np_tables()
    n = batch.shape[-1]
    out = np.zeros_like(batch)
    for j in range(n):
        acc = np.zeros(batch.shape[:-2] + (n,), dtype=batch.dtype)
        for k in range(n):
            term = mul[batch[..., :, k], B[k, j]]
            acc = add[acc, term]
        out[..., :, j] = acc
    return out


# ---------------------------------------------------------------------------
# prime-field expansion and row reduction


def prime_coords(F: Field, v: Vec) -> tuple[int, ...]:
    out: list[int] = []
    for a in v:
        out.extend(F.coords(a))
    return tuple(out)


def from_prime_coords(F: Field, coords: Sequence[int]) -> Vec:
    h = F.h
    return tuple(F.from_coords(coords[i : i + h]) for i in range(0, len(coords), h))


def gfp_rref(rows: list[list[int]], p: int) -> list[list[int]]:
    """In-place-ish reduced row echelon form over GF(p); returns nonzero rows."""
    rows = [list(r) for r in rows]
    m = len(rows)
    if not m:
        return []
    n = len(rows[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == m:
            break
    return [row for row in rows if any(row)]


def gf2_rref_bits(rows: Iterable[int]) -> tuple[int, ...]:
    """RREF over GF(2) with rows as little-endian bitmask ints.

    Returns the nonzero rows sorted by pivot, a canonical form for the span.
    """
    basis: list[int] = []  # kept reduced; basis[i] has pivot pivots[i]
    pivots: list[int] = []
    for row in rows:
        for b, pv in zip(basis, pivots):
            if (row >> pv) & 1:
                row ^= b
        if row:
            pv = (row & -row).bit_length() - 1
            # reduce existing rows by the new one
            for i in range(len(basis)):
                if (basis[i] >> pv) & 1:
                    basis[i] ^= row
            basis.append(row)
            pivots.append(pv)
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return tuple(basis[i] for i in order)


@dataclass(frozen=True)
class Subspace:
    """A GF(p^d)-subspace canonicalized as an RREF basis over GF(p).

    `rows` are little-endian bitmasks for p = 2 and digit tuples otherwise;
    `ncols` is the prime-field dimension of the ambient space.
    """

    p: int
    ncols: int
    sub_degree: int
    rows: tuple

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def size(self) -> int:
        return self.p**self.dim

    def contains_coords(self, coords: Sequence[int]) -> bool:
        if self.p == 2:
            v = _bits_of(coords)
            for row in self.rows:
                pv = (row & -row).bit_length() - 1
                if (v >> pv) & 1:
                    v ^= row
            return v == 0
        red = gfp_rref([list(r) for r in self.rows] + [list(coords)], self.p)
        return len(red) == self.dim

    def vectors_coords(self) -> Iterator[tuple[int, ...]]:
        """All p^dim member vectors in prime coordinates."""
        if self.p == 2:
            for mask in range(1 << self.dim):
                acc = 0
                m = mask
                i = 0
                while m:
                    if m & 1:
                        acc ^= self.rows[i]
                    m >>= 1
                    i += 1
                yield tuple((acc >> j) & 1 for j in range(self.ncols))
        else:
            for combo in product(range(self.p), repeat=self.dim):
                acc = [0] * self.ncols
                for c, row in zip(combo, self.rows):
                    if c:
                        acc = [(a + c * b) % self.p for a, b in zip(acc, row)]
                yield tuple(acc)


def _bits_of(coords: Sequence[int]) -> int:
    v = 0
    for j, c in enumerate(coords):
        if c & 1:
            v |= 1 << j
    return v


def canonical_subspace(F: Field, vectors: Sequence[Vec], sub_degree: int = 1) -> Subspace:
    """Canonical form of the GF(p^sub_degree)-span of the given vectors.

    The span is computed in the prime-field expansion: each generator is
    multiplied by a GF(p)-basis of the subfield GF(p^sub_degree) before row
    reduction, which makes the result closed under subfield scaling.
    """
    if F.h % sub_degree:
        raise FieldError(f"{sub_degree} does not divide extension degree {F.h}")
    n = len(vectors[0]) if vectors else 0
    ncols = n * F.h
    scalars = _subfield_basis(F, sub_degree)
    expanded = []
    for v in vectors:
        for s in scalars:
            expanded.append(prime_coords(F, vec_scale(F, s, v)))
    if F.p == 2:
        rows = gf2_rref_bits(_bits_of(c) for c in expanded)
        return Subspace(2, ncols, sub_degree, rows)
    rows = gfp_rref([list(c) for c in expanded], F.p)
    return Subspace(F.p, ncols, sub_degree, tuple(tuple(r) for r in rows))


def subspace_from_coord_vectors(p: int, ncols: int, coords: Iterable[Sequence[int]],
                                sub_degree: int = 1) -> Subspace:
    if p == 2:
        return Subspace(2, ncols, sub_degree, gf2_rref_bits(_bits_of(c) for c in coords))
    rows = gfp_rref([list(c) for c in coords], p)
    return Subspace(p, ncols, sub_degree, tuple(tuple(r) for r in rows))


def _subfield_basis(F: Field, sub_degree: int) -> list[int]:
    """A GF(p)-basis of GF(p^sub_degree) inside F, as F-indices."""
    if sub_degree == F.h:
        return [F.exp(i) if i else 1 for i in range(F.h)]
    gen = F.exp((F.q - 1) // (F.p**sub_degree - 1)) if F.p**sub_degree > 2 else 1
    basis = []
    cur = 1
    for _ in range(sub_degree):
        basis.append(cur)
        cur = F.mul(cur, gen)
    return basis


def subspace_members(F: Field, S: Subspace, n: int) -> list[Vec]:
    """All member vectors of S, converted back to GF(q)^n tuples."""
    return [from_prime_coords(F, c) for c in S.vectors_coords()]


# ---------------------------------------------------------------------------
# bilinear and hermitian forms


@dataclass(frozen=True)
class BilinearForm:
    """kind is 'symplectic', 'hermitian' or 'bilinear'.

    For hermitian forms the second argument is conjugated entrywise by
    x -> x^(p^(h/2)).
    """

    kind: str
    gram: Mat
    conj_power: int = 0  # Frobenius power applied to the second argument

    def is_alternating(self, F: Field) -> bool:
        n = len(self.gram)
        for i in range(n):
            if self.gram[i][i] != 0:
                return False
            for j in range(n):
                if self.gram[i][j] != F.neg(self.gram[j][i]):
                    return False
        return True

    def is_hermitian_symmetric(self, F: Field) -> bool:
        n = len(self.gram)
        for i in range(n):
            for j in range(n):
                if self.gram[i][j] != F.frob(self.gram[j][i], self.conj_power):
                    return False
        return True


def symplectic_form(F: Field, n: int) -> BilinearForm:
    """Block-diagonal alternating form pairing (e1,e2), (e3,e4), ..."""
    if n % 2:
        raise LinAlgError("symplectic forms need even dimension")
    g = [[0] * n for _ in range(n)]
    for i in range(0, n, 2):
        g[i][i + 1] = F.neg(1)
        g[i + 1][i] = 1
    return BilinearForm("symplectic", tuple(tuple(r) for r in g))


def hermitian_identity_form(F: Field) -> BilinearForm:
    if F.h % 2:
        raise LinAlgError("hermitian forms need a square field")
    return BilinearForm("hermitian", identity(3), conj_power=F.h // 2)


def evaluate_form(F: Field, form: BilinearForm, u: Vec, v: Vec) -> int:
    n = len(form.gram)
    if len(u) != n or len(v) != n:
        raise LinAlgError("dimension mismatch in form evaluation")
    if form.conj_power:
        v = tuple(F.frob(x, form.conj_power) for x in v)
    acc = 0
    for i, ui in enumerate(u):
        if not ui:
            continue
        row = form.gram[i]
        for j, vj in enumerate(v):
            if vj and row[j]:
                acc = F.add(acc, F.mul(ui, F.mul(row[j], vj)))
    return acc


def invariant_bilinear_forms(F: Field, gens: Sequence[Mat], kind: str = "bilinear",
                             hermitian_conj: int | None = None) -> list[BilinearForm]:
    """Basis of the space of forms with A G tau(A)^T = G for all generators.

    Solved as one linear system over GF(p) in the h*n^2 prime coordinates of
    the Gram matrix.  `kind` adds the shape constraints: alternating for
    'symplectic', G = conj-transpose(G) for 'hermitian'.
    """
    if not gens:
        return []
    n = len(gens[0])
    h = F.h
    conj = hermitian_conj if hermitian_conj is not None else (h // 2 if h % 2 == 0 else 0)
    nvars = n * n * h

    def gram_from_vars(vals: Sequence[int]) -> Mat:
        g = []
        for i in range(n):
            row = []
            for j in range(n):
                base = (i * n + j) * h
                row.append(F.from_coords(vals[base : base + h]))
            g.append(tuple(row))
        return tuple(g)

    def vars_from_gram(G: Mat) -> list[int]:
        out: list[int] = []
        for row in G:
            for a in row:
                out.extend(F.coords(a))
        return out

    equations: list[list[int]] = []

    def add_operator_rows(op) -> None:
        """Rows of (op - id) applied to each basis Gram, transposed."""
        cols = []
        for v in range(nvars):
            vals = [0] * nvars
            vals[v] = 1
            G = gram_from_vars(vals)
            img = vars_from_gram(op(G))
            img[v] = (img[v] - 1) % F.p
            cols.append(img)
        for r in range(nvars):
            equations.append([cols[v][r] % F.p for v in range(nvars)])

    for A in gens:
        At = mat_transpose(A)
        if kind == "hermitian":
            At = mat_apply_entrywise(F, At, lambda x: F.frob(x, conj))

        def op(G, A=A, At=At):
            return mat_mul(F, A, mat_mul(F, G, At))

        add_operator_rows(op)

    if kind == "symplectic":
        # alternating: zero diagonal and G + G^T = 0
        for i in range(n):
            for j in range(n):
                for s in range(h):
                    row = [0] * nvars
                    if i == j:
                        row[(i * n + j) * h + s] = 1
                        equations.append(row)
                    elif i < j:
                        row[(i * n + j) * h + s] = 1
                        row[(j * n + i) * h + s] = (row[(j * n + i) * h + s] + 1) % F.p
                        equations.append(row)
    elif kind == "hermitian":
        for v in range(nvars):
            vals = [0] * nvars
            vals[v] = 1
            G = gram_from_vars(vals)
            Gc = mat_apply_entrywise(F, mat_transpose(G), lambda x: F.frob(x, conj))
            img = vars_from_gram(Gc)
            img[v] = (img[v] - 1) % F.p
            equations.append(img)

    null = _nullspace_gfp(equations, nvars, F.p)
    out = []
    for vals in null:
        out.append(BilinearForm(kind, gram_from_vars(vals),
                                conj_power=conj if kind == "hermitian" else 0))
    return out


def _nullspace_gfp(equations: list[list[int]], nvars: int, p: int) -> list[list[int]]:
    rows = gfp_rref(equations, p) if equations else []
    pivots = []
    for row in rows:
        pivots.append(next(i for i, x in enumerate(row) if x))
    free = [i for i in range(nvars) if i not in pivots]
    basis = []
    for f in free:
        vec = [0] * nvars
        vec[f] = 1
        for row, pv in zip(rows, pivots):
            vec[pv] = (-row[f]) % p
        basis.append(vec)
    return basis


def enumerate_isotropic(F: Field, form: BilinearForm, d: int, n: int) -> list[Subspace]:
    """All totally isotropic d-dimensional GF(q)-subspaces of GF(q)^n.

    Brute-force extension search, capped at ambient spaces of at most 2^12
    vectors.
    """
    if F.q**n > 1 << 12:
        raise LinAlgError("isotropic enumeration capped at 2^12 ambient vectors")
    vectors = list(product(range(F.q), repeat=n))

    def isotropic(v: Vec) -> bool:
        return evaluate_form(F, form, v, v) == 0

    seeds = [v for v in vectors if any(v) and isotropic(v)]
    found: set[Subspace] = set()
    frontier: set[Subspace] = set()
    for v in seeds:
        frontier.add(canonical_subspace(F, [v], F.h))
    for _ in range(1, d):
        nxt: set[Subspace] = set()
        for S in frontier:
            members = subspace_members(F, S, n)
            for v in seeds:
                if S.contains_coords(prime_coords(F, v)):
                    continue
                if all(evaluate_form(F, form, u, v) == 0 for u in members):
                    if form.conj_power and any(
                        evaluate_form(F, form, v, u) != 0 for u in members
                    ):
                        continue
                    nxt.add(canonical_subspace(F, members + [v], F.h))
        frontier = nxt
    found = {S for S in frontier if S.dim == d * F.h}
    if d == 1:
        found = frontier
    return sorted(found, key=lambda S: S.rows)
