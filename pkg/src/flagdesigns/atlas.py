"""Constructors for the concrete matrix groups the catalog needs.

Every entry returns a GenGroup whose known_order comes from the standard
order formula; the test suite certifies each order by bounded closure
enumeration.  Generator choices are frozen either as code formulas
(transvection/diagonal/permutation generators for the classical families)
or as bundled fixture files (the explicit SL2(5) < GL4(3)); correctness
never depends on a particular textbook choice because the orders and the
invariant forms are re-verified.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from itertools import product

from .fields import Field, FieldError, make_field
from .linalg import Mat, Vec, identity, is_invertible, mat_mul
from .orbits import AffineMap, GenGroup, enumerate_elements


class AtlasError(ValueError):
    pass


def load_matrix_fixtures(relpath: str) -> dict[str, tuple[int, int, Mat]]:
    """Parse a fixture file of lines 'name n q e00 e01 ...'."""
    text = resources.files("flagdesigns.data").joinpath(relpath).read_text()
    out: dict[str, tuple[int, int, Mat]] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        name, n, q = parts[0], int(parts[1]), int(parts[2])
        entries = [int(t) for t in parts[3:]]
        if len(entries) != n * n:
            raise AtlasError(f"fixture {name}: expected {n * n} entries")
        A = tuple(tuple(entries[i * n : (i + 1) * n]) for i in range(n))
        out[name] = (n, q, A)
    return out


# ---------------------------------------------------------------------------
# classical families


def sl2(q: int) -> GenGroup:
    F = _field_of_order(q)
    w = F.w
    gens = [
        AffineMap.linear(((1, 1), (0, 1))),            # transvection
        AffineMap.linear(((0, 1), (F.neg(1), 0))),     # Weyl element
        AffineMap.linear(((w, 0), (0, F.inv(w)))),     # torus
    ]
    order = q * (q * q - 1)
    return GenGroup(F, 2, gens, known_order=order, name=f"SL2({q})")


def _symplectic_transvection(F: Field, gram: Mat, v: Vec, lam: int = 1) -> Mat:
    n = len(v)
    rows = []
    for i in range(n):
        coef = 0
        for j in range(n):
            if gram[i][j] and v[j]:
                coef = F.add(coef, F.mul(gram[i][j], v[j]))
        coef = F.mul(lam, coef)
        row = tuple(
            F.add(1 if i == j else 0, F.mul(coef, v[j])) for j in range(n)
        )
        rows.append(row)
    return tuple(rows)


def sp4(q: int) -> GenGroup:
    """Sp4(q) preserving the block form -x1 y2 + x2 y1 - x3 y4 + x4 y3."""
    from .linalg import symplectic_form

    F = _field_of_order(q)
    gram = symplectic_form(F, 4).gram
    dirs: list[Vec] = [
        (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
        (1, 0, 1, 0), (0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0),
    ]
    gens = []
    scalars = [1] if F.q <= 3 else [1, F.w]
    for v in dirs:
        for lam in scalars:
            A = _symplectic_transvection(F, gram, v, lam)
            if A != identity(4):
                gens.append(AffineMap.linear(A))
    order = q**4 * (q**2 - 1) * (q**4 - 1)
    return GenGroup(F, 4, gens, known_order=order, name=f"Sp4({q})")


def su3(s: int) -> GenGroup:
    """SU3(s) < GL3(s^2) preserving the identity-Gram hermitian form.

    For s > 2: generated by the unitary transvections x -> x + lam*h(x,v)*v
    over all isotropic directions v (lam of zero trace), plus a norm-one
    diagonal and the coordinate 3-cycle.  SU3(2) is solvable and is not
    generated by its transvections, so it is cut out of GL3(4) directly.
    """
    F = _field_of_order(s * s)
    conj = F.h // 2
    if s == 2:
        return _su3_2_bruteforce(F, conj)

    def bar(x: int) -> int:
        return F.frob(x, conj)

    def herm(u: Vec, v: Vec) -> int:
        acc = 0
        for a, b in zip(u, v):
            acc = F.add(acc, F.mul(a, bar(b)))
        return acc

    trace_zero = [lam for lam in range(1, F.q) if F.add(lam, bar(lam)) == 0]
    isotropic = []
    seen_proj: set[Vec] = set()
    for v in product(range(F.q), repeat=3):
        if any(v) and herm(v, v) == 0:
            first = next(x for x in v if x)
            canon = tuple(F.mul(F.inv(first), x) for x in v)
            if canon not in seen_proj:
                seen_proj.add(canon)
                isotropic.append(canon)
    gens: list[AffineMap] = []
    for v in isotropic:
        for lam in trace_zero[:1]:
            rows = []
            for i in range(3):
                e = tuple(1 if j == i else 0 for j in range(3))
                coef = F.mul(lam, herm(e, v))
                rows.append(tuple(F.add(e[j], F.mul(coef, v[j])) for j in range(3)))
            gens.append(AffineMap.linear(tuple(rows)))
    u = F.exp((F.q - 1) // (s + 1)) if s > 1 else 1
    gens.append(AffineMap.linear(((u, 0, 0), (0, F.inv(u), 0), (0, 0, 1))))
    gens.append(AffineMap.linear(((0, 1, 0), (0, 0, 1), (1, 0, 0))))
    order = s**3 * (s * s - 1) * (s**3 + 1)
    return GenGroup(F, 3, gens, known_order=order, name=f"SU3({s})")


@lru_cache(maxsize=None)
def _su3_2_bruteforce(F: Field, conj: int) -> GenGroup:
    def bar(x: int) -> int:
        return F.frob(x, conj)

    def det3(A) -> int:
        (a, b, c), (d, e, f_), (g, h_, i) = A
        terms = [
            F.mul(a, F.sub(F.mul(e, i), F.mul(f_, h_))),
            F.neg(F.mul(b, F.sub(F.mul(d, i), F.mul(f_, g)))),
            F.mul(c, F.sub(F.mul(d, h_), F.mul(e, g))),
        ]
        out = 0
        for t in terms:
            out = F.add(out, t)
        return out

    # rows of a unitary matrix are an orthonormal frame for the identity Gram
    def norm1_rows():
        for v in product(range(F.q), repeat=3):
            acc = 0
            for x in v:
                acc = F.add(acc, F.mul(x, bar(x)))
            if acc == 1:
                yield v

    rows = list(norm1_rows())

    def orthogonal(u, v) -> bool:
        acc = 0
        for a, b in zip(u, v):
            acc = F.add(acc, F.mul(a, bar(b)))
        return acc == 0

    elements = []
    for r1 in rows:
        for r2 in rows:
            if not orthogonal(r1, r2):
                continue
            for r3 in rows:
                if orthogonal(r1, r3) and orthogonal(r2, r3):
                    A = (r1, r2, r3)
                    if det3(A) == 1:
                        elements.append(A)
    if len(elements) != 216:
        raise AtlasError(f"SU3(2) scan found {len(elements)} elements")
    # trim to a small generating set, greedily
    gens: list[AffineMap] = []
    group = GenGroup(F, 3, gens, name="SU3(2)")
    have = 1
    for A in sorted(elements):
        if have == 216:
            break
        trial = GenGroup(F, 3, gens + [AffineMap.linear(A)], name="SU3(2)")
        size = len(enumerate_elements(trial))
        if size > have:
            gens.append(AffineMap.linear(A))
            have = size
    return GenGroup(F, 3, gens, known_order=216, name="SU3(2)")


# ---------------------------------------------------------------------------
# the twisted rank-one family on V4(q), q = 2^(2e+1)


def suzuki_unipotent(F: Field, l: int, w: int) -> Mat:
    s = F.suzuki_sigma
    row3_0 = F.add(F.mul(l, s(l)), w)                      # l^(1+sigma) + w
    row4_0 = F.add(F.add(F.mul(F.mul(l, l), s(l)), F.mul(l, w)), s(w))
    return (
        (1, 0, 0, 0),
        (l, 1, 0, 0),
        (row3_0, s(l), 1, 0),
        (row4_0, w, l, 1),
    )


def suzuki_torus(F: Field, m: int) -> Mat:
    if m == 0:
        raise AtlasError("torus parameter must be nonzero")
    s = F.suzuki_sigma
    d1 = F.mul(F.mul(m, m), s(m))      # m^(sigma+2)
    d2 = s(m)
    d3 = F.inv(d2)
    d4 = F.inv(d1)
    return ((d1, 0, 0, 0), (0, d2, 0, 0), (0, 0, d3, 0), (0, 0, 0, d4))


SUZUKI_FLIP: Mat = ((0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0))


def sz(q: int) -> GenGroup:
    F = _field_of_order(q)
    e = F.suzuki_e  # validates the 2^(2e+1) shape
    gens = []
    for i in range(F.h):
        basis = F.exp(i) if i else 1
        gens.append(AffineMap.linear(suzuki_unipotent(F, basis, 0)))
        gens.append(AffineMap.linear(suzuki_unipotent(F, 0, basis)))
    gens.append(AffineMap.linear(suzuki_torus(F, F.w)))
    gens.append(AffineMap.linear(SUZUKI_FLIP))
    order = q * q * (q * q + 1) * (q - 1)
    return GenGroup(F, 4, gens, known_order=order, name=f"Sz({q})")


# ---------------------------------------------------------------------------
# semilinear one-dimensional subgroups on GF(p^n) viewed as V_n(p)


def _semilinear_matrix(big: Field, scale_log: int | None, frob_s: int) -> Mat:
    """GF(p)-matrix of x -> w^scale_log * x^(p^frob_s) on GF(p^n)."""
    n = big.h
    rows = []
    for i in range(n):
        x = big.exp(i) if i else 1
        y = big.frob(x, frob_s) if frob_s else x
        if scale_log is not None:
            y = big.mul(big.exp(scale_log), y)
        rows.append(big.coords(y))
    return tuple(rows)


def gammaL1_subgroup(p: int, n: int, c: int, e: int, s: int) -> GenGroup:
    """The subgroup < w^c, w^e * frob^s > of GammaL1(p^n) acting on V_n(p).

    Returns matrices over GF(p); the order is (p^n - 1)/c * (n/s) when the
    parameters satisfy the standard compatibility conditions, and is left
    unset otherwise (callers enumerate).
    """
    big = make_field(p, n)
    F = make_field(p, 1)
    gens = [
        AffineMap.linear(_semilinear_matrix(big, c, 0)),
        AffineMap.linear(_semilinear_matrix(big, e, s % n)),
    ]
    order = None
    if (p**n - 1) % c == 0 and n % s == 0 and (e * ((p**n - 1) // (p**s - 1))) % c == 0:
        order = ((p**n - 1) // c) * (n // s)
    return GenGroup(F, n, gens, known_order=order,
                    name=f"GammaL1({p}^{n})<{c},{e},{s}>")


# ---------------------------------------------------------------------------
# the unitary machinery on V6(2)


def _gf4_block(F4: Field, a: int) -> list[list[int]]:
    """2x2 GF(2) matrix of y -> a*y on GF(4) in the basis {1, w}."""
    return [list(F4.coords(F4.mul(a, F4.exp(i) if i else 1))) for i in range(2)]


def _blowdown_gf4(F4: Field, A: Mat) -> Mat:
    n = len(A)
    big = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            blk = _gf4_block(F4, A[i][j])
            for a in range(2):
                for b in range(2):
                    big[2 * i + a][2 * j + b] = blk[a][b]
    return tuple(tuple(r) for r in big)


@lru_cache(maxsize=None)
def gammaU3_2_on_V6_2() -> GenGroup:
    """The full semilinear unitary group on GF(4)^3 written on V6(2).

    Generated by SU3(2) (order 216), a determinant-w diagonal and the GF(4)
    Frobenius, for a total order of 1296.  Subgroup entries for the catalog
    are cut from this group.
    """
    F4 = make_field(2, 2)
    F2 = make_field(2, 1)
    sub = su3(2)
    gens = [AffineMap.linear(_blowdown_gf4(F4, g.A)) for g in sub.gens]
    det_w = ((F4.w, 0, 0), (0, 1, 0), (0, 0, 1))
    gens.append(AffineMap.linear(_blowdown_gf4(F4, det_w)))
    fb = [list(F4.coords(F4.mul(x, x))) for x in (1, F4.w)]
    frob = [[0] * 6 for _ in range(6)]
    for i in range(3):
        for a in range(2):
            for b in range(2):
                frob[2 * i + a][2 * i + b] = fb[a][b]
    gens.append(AffineMap.linear(tuple(tuple(r) for r in frob)))
    return GenGroup(F2, 6, gens, known_order=1296, name="GammaU3(2)-on-V6(2)")


@lru_cache(maxsize=None)
def su3_2_on_V6_2() -> GenGroup:
    F4 = make_field(2, 2)
    F2 = make_field(2, 1)
    sub = su3(2)
    gens = [AffineMap.linear(_blowdown_gf4(F4, g.A)) for g in sub.gens]
    return GenGroup(F2, 6, gens, known_order=216, name="SU3(2)-on-V6(2)")


@lru_cache(maxsize=None)
def su3_2_frob_on_V6_2() -> GenGroup:
    """SU3(2) extended by the GF(4) Frobenius; order 432."""
    base = su3_2_on_V6_2()
    full = gammaU3_2_on_V6_2()
    gens = list(base.gens) + [full.gens[-1]]
    return GenGroup(base.field, 6, gens, known_order=432,
                    name="SU3(2):frob-on-V6(2)")


# ---------------------------------------------------------------------------
# the explicit SL2(5) < GL4(3)


@lru_cache(maxsize=None)
def ex_sl2_5_matrices() -> dict[str, Mat]:
    fixtures = load_matrix_fixtures("atlas/sl2_5_gl4_3/matrices.txt")
    return {name: A for name, (_, _, A) in fixtures.items()}


def sl2_5_gl4_3() -> GenGroup:
    F = make_field(3, 1)
    mats = ex_sl2_5_matrices()
    gens = [AffineMap.linear(mats["alpha"]), AffineMap.linear(mats["beta"])]
    return GenGroup(F, 4, gens, known_order=120, name="SL2(5)<GL4(3)")


def sl2_5_extended(level: int) -> GenGroup:
    """level 0: the SL2(5); 1: adjoined delta (240); 2: delta and psi (480)."""
    G = sl2_5_gl4_3()
    mats = ex_sl2_5_matrices()
    gens = list(G.gens)
    order = 120
    if level >= 1:
        gens.append(AffineMap.linear(mats["delta"]))
        order = 240
    if level >= 2:
        gens.append(AffineMap.linear(mats["psi"]))
        order = 480
    return GenGroup(G.field, 4, gens, known_order=order,
                    name=f"SL2(5)<GL4(3)-ext{level}")


# ---------------------------------------------------------------------------


def affine_closure(G0: GenGroup, name: str | None = None) -> GenGroup:
    """T:G0 -- the linear group together with all basis translations."""
    if not G0.is_linear:
        raise AtlasError("affine_closure input must be linear")
    F = G0.field
    n = G0.dim
    gens = list(G0.gens)
    for i in range(n):
        for j in range(F.h):
            t = [0] * n
            t[i] = F.exp(j) if j else 1
            gens.append(AffineMap(identity(n), tuple(t)))
    order = None if G0.known_order is None else F.q**n * G0.known_order
    return GenGroup(F, n, gens, known_order=order,
                    name=name or f"T:{G0.name}")


def translation_group(F: Field, n: int) -> GenGroup:
    gens = []
    for i in range(n):
        for j in range(F.h):
            t = [0] * n
            t[i] = F.exp(j) if j else 1
            gens.append(AffineMap(identity(n), tuple(t)))
    return GenGroup(F, n, gens, known_order=F.q**n, name=f"T(V{n}({F.q}))")


def atlas(name: str, **params) -> GenGroup:
    """Dispatch by family name; see the individual constructors."""
    if name == "SL2":
        return sl2(params["q"])
    if name == "Sp4":
        return sp4(params["q"])
    if name == "SU3":
        return su3(params["s"])
    if name == "Sz":
        return sz(params["q"])
    if name == "GammaL1-subgroup":
        return gammaL1_subgroup(params["p"], params["n"], params["c"],
                                params["e"], params["s"])
    if name == "Ex3-SL2(5)":
        return sl2_5_gl4_3()
    if name == "GammaU3(2)-on-V6(2)":
        return gammaU3_2_on_V6_2()
    if name == "SU3(2)-on-V6(2)":
        return su3_2_on_V6_2()
    raise AtlasError(f"unknown atlas family {name!r}")


def _field_of_order(q: int) -> Field:
    for p in range(2, 1 << 10):
        if q % p == 0:
            h = 0
            qq = q
            while qq % p == 0:
                qq //= p
                h += 1
            if qq != 1:
                raise AtlasError(f"{q} is not a prime power")
            return make_field(p, h)
    raise AtlasError(f"{q} is not a prime power")
