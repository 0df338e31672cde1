"""Exact arithmetic in small finite fields GF(p^h).

Elements of GF(p^h) are stored as integer indices in [0, p^h).  The index
encodes the coordinate vector of the element in the fixed polynomial basis
{1, w, ..., w^(h-1)}, base-p and little-endian, where w is the residue of x
modulo the defining polynomial.  The defining polynomial is always chosen
primitive, so w generates the multiplicative group and doubles as the
canonical primitive element.

Moduli come from a bundled table (data/moduli.txt) so that element indices
are reproducible across runs; see scripts/gen_modulus_table.py for the
generation rule (smallest primitive polynomial in index order).

Multiplication uses exp/log tables up to 2^16 elements and falls back to
polynomial arithmetic above that.  Addition is XOR for p = 2 and Zech
logarithms otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import gcd
from typing import Iterable, Iterator

import numpy as np

SIZE_CAP = 1 << 20
TABLE_CAP = 1 << 16


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p), coefficients little-endian


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    h = len(mod) - 1
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    # reduce by the monic modulus
    for i in range(len(res) - 1, h - 1, -1):
        c = res[i]
        if c:
            res[i] = 0
            for j in range(h):
                res[i - h + j] = (res[i - h + j] - c * mod[j]) % p
    res = res[:h]
    while len(res) < h:
        res.append(0)
    return res


def _index_to_poly(idx: int, p: int, h: int) -> list[int]:
    out = []
    for _ in range(h):
        out.append(idx % p)
        idx //= p
    return out


def _poly_to_index(poly: Iterable[int], p: int) -> int:
    idx = 0
    for c in reversed(list(poly)):
        idx = idx * p + (c % p)
    return idx


def poly_is_irreducible(coeffs: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    h = len(coeffs) - 1
    if h < 1 or coeffs[-1] != 1:
        return False
    if h == 1:
        return True
    for d in range(1, h // 2 + 1):
        for enc in range(p**d):
            div = _index_to_poly(enc, p, d) + [1]
            if _poly_divides(div, coeffs, p):
                return False
    return True


def _poly_divides(div: list[int], f: list[int], p: int) -> bool:
    rem = list(f)
    dd = len(div) - 1
    inv_lead = pow(div[-1], -1, p)
    for i in range(len(rem) - 1, dd - 1, -1):
        c = rem[i]
        if c:
            q = (c * inv_lead) % p
            for j in range(dd + 1):
                rem[i - dd + j] = (rem[i - dd + j] - q * div[j]) % p
    return not any(rem[:dd])


def poly_is_primitive(coeffs: list[int], p: int) -> bool:
    """x must have multiplicative order p^h - 1 modulo the irreducible f."""
    h = len(coeffs) - 1
    order = p**h - 1
    x = [0, 1][:h] + [0] * max(0, h - 2)
    if h == 1:
        x = [(-coeffs[0]) % p]
    for w in _prime_factors(order):
        if _poly_powmod(x, order // w, coeffs, p) == _one(h):
            return False
    return _poly_powmod(x, order, coeffs, p) == _one(h)


def _one(h: int) -> list[int]:
    return [1] + [0] * (h - 1)


def _poly_powmod(a: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = _one(len(mod) - 1)
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def find_primitive_modulus(p: int, h: int) -> list[int]:
    """Smallest (in index encoding) monic primitive polynomial of degree h."""
    if h == 1:
        for g in range(1, p):
            ok = all(pow(g, (p - 1) // w, p) != 1 for w in _prime_factors(p - 1))
            if ok or p == 2:
                return [(-g) % p, 1]
        raise FieldError(f"no primitive root mod {p}")
    for enc in range(p**h):
        coeffs = _index_to_poly(enc, p, h) + [1]
        if poly_is_irreducible(coeffs, p) and poly_is_primitive(coeffs, p):
            return coeffs
    raise FieldError(f"no primitive polynomial for p={p} h={h}")


@lru_cache(maxsize=1)
def _bundled_moduli() -> dict[tuple[int, int], tuple[int, ...]]:
    table = {}
    text = resources.files("flagdesigns.data").joinpath("moduli.txt").read_text()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [int(t) for t in line.split()]
        p, h, coeffs = parts[0], parts[1], parts[2:]
        table[(p, h)] = tuple(coeffs)
    return table


# ---------------------------------------------------------------------------


class Field:
    """GF(p^h) with all operations on integer element indices."""

    def __init__(self, p: int, h: int, modulus: tuple[int, ...]):
        self.p = p
        self.h = h
        self.q = p**h
        self.modulus = modulus
        self.zero = 0
        self.one = 1
        # w = x in the polynomial basis has index p; in a prime field the
        # modulus is x - g and w = g itself.
        if h == 1:
            self.w = (p - modulus[0]) % p or 1
        else:
            self.w = p
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._zech: list[int] | None = None
        self._exp_np: np.ndarray | None = None
        self._log_np: np.ndarray | None = None
        self._mul_np: np.ndarray | None = None
        self._add_np: np.ndarray | None = None
        if self.q <= TABLE_CAP:
            self._build_tables()

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.h})" if self.h > 1 else f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and (self.p, self.h, self.modulus) == (other.p, other.h, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.h, self.modulus))

    # -- table construction

    def _build_tables(self) -> None:
        p, h, q = self.p, self.h, self.q
        exp = [0] * (q - 1)
        log = [-1] * q
        cur = _one(h)
        for k in range(q - 1):
            idx = _poly_to_index(cur, p)
            exp[k] = idx
            log[idx] = k
            cur = _poly_mulmod(cur, _index_to_poly(self.w, p, h), self.modulus, p)
        if _poly_to_index(cur, p) != 1:
            raise FieldError("modulus is not primitive")
        self._exp, self._log = exp, log
        if p != 2:
            # zech[k] = log(1 + w^k), or -1 when 1 + w^k = 0
            zech = [-1] * (q - 1)
            for k in range(q - 1):
                s = self._add_poly(1, exp[k])
                zech[k] = -1 if s == 0 else log[s]
            self._zech = zech

    def _add_poly(self, a: int, b: int) -> int:
        p = self.p
        out, mult = 0, 1
        for _ in range(self.h):
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    # -- scalar ops

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self._log[a], self._log[b]
        z = self._zech[(lb - la) % (self.q - 1)]
        return 0 if z < 0 else self._exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        half = (self.q - 1) // 2
        return self._exp[(self._log[a] + half) % (self.q - 1)]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._mul_poly(a, b)

    def _mul_poly(self, a: int, b: int) -> int:
        pa = _index_to_poly(a, self.p, self.h)
        pb = _index_to_poly(b, self.p, self.h)
        return _poly_to_index(_poly_mulmod(pa, pb, list(self.modulus), self.p), self.p)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inversion of zero field element")
        if self._log is not None:
            return self._exp[(-self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 0 if e else 1
        if self._log is not None:
            return self._exp[(self._log[a] * e) % (self.q - 1)]
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frob(self, a: int, s: int) -> int:
        """a -> a^(p^s), the s-th Frobenius power; requires 0 <= s < h."""
        if not 0 <= s < self.h:
            raise FieldError(f"frobenius power {s} out of range [0, {self.h})")
        return self.pow(a, self.p**s)

    def log(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("log of zero")
        if self._log is not None:
            return self._log[a]
        e, cur = 0, 1
        while cur != a:
            cur = self.mul(cur, self.w)
            e += 1
        return e

    def exp(self, k: int) -> int:
        if self._exp is not None:
            return self._exp[k % (self.q - 1)]
        return self.pow(self.w, k % (self.q - 1))

    def trace(self, a: int, sub_degree: int) -> int:
        """Relative trace into GF(p^sub_degree); sub_degree must divide h."""
        if self.h % sub_degree:
            raise FieldError(f"{sub_degree} does not divide extension degree {self.h}")
        acc = 0
        cur = a
        for _ in range(self.h // sub_degree):
            acc = self.add(acc, cur)
            cur = self.pow(cur, self.p**sub_degree)
        return acc

    def norm(self, a: int, sub_degree: int) -> int:
        """Relative norm into GF(p^sub_degree); sub_degree must divide h."""
        if self.h % sub_degree:
            raise FieldError(f"{sub_degree} does not divide extension degree {self.h}")
        acc = 1
        cur = a
        for _ in range(self.h // sub_degree):
            acc = self.mul(acc, cur)
            cur = self.pow(cur, self.p**sub_degree)
        return acc

    def subfield_elements(self, sub_degree: int) -> list[int]:
        if self.h % sub_degree:
            raise FieldError(f"{sub_degree} does not divide extension degree {self.h}")
        d = self.p**sub_degree
        if d == self.q:
            return list(range(self.q))
        step = (self.q - 1) // (d - 1)
        return [0] + [self.exp(step * i) for i in range(d - 1)]

    # -- the twisting automorphism used by the rank-one 2-transitive groups
    #    on V4(q), defined only for q = 2^(2e+1): s(x) = x^(2^(e+1)),
    #    so that s(s(x)) = x^2.

    @property
    def suzuki_e(self) -> int:
        if self.p != 2 or self.h % 2 == 0 or self.h < 3:
            raise FieldError(f"{self!r} is not of shape GF(2^(2e+1)), e >= 1")
        return (self.h - 1) // 2

    def suzuki_sigma(self, a: int) -> int:
        return self.frob(a, self.suzuki_e + 1)

    def sigma_pow(self, a: int, units: int, sigmas: int) -> int:
        """a^(units + sigmas*2^(e+1)); negative totals run through inv."""
        e = self.suzuki_e
        total = units + sigmas * (1 << (e + 1))
        return self.pow(a, total)

    # -- iteration and vectorized tables

    def elements(self) -> Iterator[int]:
        return iter(range(self.q))

    def units(self) -> Iterator[int]:
        return iter(range(1, self.q))

    def coords(self, a: int) -> tuple[int, ...]:
        return tuple(_index_to_poly(a, self.p, self.h))

    def from_coords(self, coords: Iterable[int]) -> int:
        return _poly_to_index(coords, self.p)

    def np_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """(mul_table, add_table) as q x q uint32 arrays; q <= 4096 only."""
        if self.q > 4096:
            raise FieldError("full op tables only built for q <= 4096")
        if self._mul_np is None:
            q = self.q
            mul = np.zeros((q, q), dtype=np.uint32)
            add = np.zeros((q, q), dtype=np.uint32)
            for a in range(q):
                for b in range(q):
                    mul[a, b] = self.mul(a, b)
                    add[a, b] = self.add(a, b)
            self._mul_np = mul
            self._add_np = add
        return self._mul_np, self._add_np

    def np_explog(self) -> tuple[np.ndarray, np.ndarray]:
        if self._exp is None:
            raise FieldError("exp/log tables unavailable above 2^16 elements")
        if self._exp_np is None:
            self._exp_np = np.array(self._exp, dtype=np.uint32)
            self._log_np = np.array([max(v, 0) for v in self._log], dtype=np.int64)
        return self._exp_np, self._log_np


@dataclass(frozen=True)
class FieldElem:
    """An element of a specific field; thin wrapper used at API boundaries."""

    field: Field
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.field.q:
            raise FieldError(f"index {self.index} outside field of size {self.field.q}")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        return FieldElem(self.field, self.field.add(self.index, _match(self, other)))

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        return FieldElem(self.field, self.field.mul(self.index, _match(self, other)))

    def __neg__(self) -> "FieldElem":
        return FieldElem(self.field, self.field.neg(self.index))

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        return self + (-other)

    def __pow__(self, e: int) -> "FieldElem":
        return FieldElem(self.field, self.field.pow(self.index, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.index))


def _match(a: FieldElem, b: FieldElem) -> int:
    if a.field != b.field:
        raise FieldError("operands come from different fields")
    return b.index


@lru_cache(maxsize=None)
def make_field(p: int, h: int) -> Field:
    """GF(p^h) with the bundled deterministic modulus.

    Raises FieldError for non-prime p, h < 1 or p^h above the 2^20 cap.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if h < 1:
        raise FieldError(f"extension degree must be >= 1, got {h}")
    if p**h > SIZE_CAP:
        raise FieldError(f"field size {p}^{h} exceeds cap 2^20")
    modulus = _bundled_moduli().get((p, h))
    if modulus is None:
        modulus = tuple(find_primitive_modulus(p, h))
    return Field(p, h, modulus)


def field_op(kind: str, a: FieldElem, b: FieldElem | int | None = None) -> FieldElem:
    """Dispatch one arithmetic op by name: add | mul | inv | pow | neg."""
    F = a.field
    if kind == "add":
        return a + b  # type: ignore[operator]
    if kind == "mul":
        return a * b  # type: ignore[operator]
    if kind == "neg":
        return -a
    if kind == "inv":
        return a.inverse()
    if kind == "pow":
        if not isinstance(b, int):
            raise FieldError("pow exponent must be an int")
        return FieldElem(F, F.pow(a.index, b))
    raise FieldError(f"unknown field op {kind!r}")


def frobenius_power(x: FieldElem, s: int) -> FieldElem:
    return FieldElem(x.field, x.field.frob(x.index, s))


def trace_norm(kind: str, x: FieldElem, sub_degree: int) -> FieldElem:
    if kind == "trace":
        return FieldElem(x.field, x.field.trace(x.index, sub_degree))
    if kind == "norm":
        return FieldElem(x.field, x.field.norm(x.index, sub_degree))
    raise FieldError(f"unknown kind {kind!r}")


def suzuki_sigma(x: FieldElem) -> FieldElem:
    return FieldElem(x.field, x.field.suzuki_sigma(x.index))


def primitive_part(a: int, e: int) -> int:
    """Largest divisor of a^e - 1 coprime to a^i - 1 for every 1 <= i < e."""
    if a < 2 or e < 1:
        raise ValueError("need a >= 2 and e >= 1")
    if a**e > 1 << 62:
        raise OverflowError(f"{a}^{e} exceeds the 2^62 working bound")
    n = a**e - 1
    for i in range(1, e):
        m = a**i - 1
        g = gcd(n, m)
        while g > 1:
            n //= g
            g = gcd(n, m)
    return n
