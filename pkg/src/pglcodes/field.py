"""Table-driven arithmetic for GF(q^2) over GF(q), with q = p^k a prime power.

A field element is an integer index in [0, q^2): the coefficient vector
(c_{2k-1}, ..., c_1, c_0) of its residue polynomial, read as a base-p
number.  Index 0 is the zero element, index 1 the unit, and for k = 1 the
indices 0..p-1 are exactly the prime subfield.  The defining modulus is
the first monic irreducible polynomial of degree 2k over GF(p) in the
lexicographic scan of its coefficient tuple (c_{2k-1}, ..., c_0), so the
same (p, k) always yields bit-identical tables.

Multiplication runs on exp/log tables over the cyclic group of order
q^2 - 1; small fields additionally carry flat q^2 x q^2 product and sum
tables to support bulk numpy sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

DEFAULT_MAX_ORDER = 1 << 16   # largest permitted q^2
DEFAULT_TABLE_LIMIT = 4096    # largest q^2 that gets flat pair tables


class CapacityError(ValueError):
    """The requested field exceeds the configured desk-scale bound."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class CharacteristicError(DomainError):
    """The operation is only defined in the other characteristic parity."""


@dataclass(frozen=True)
class FieldSpec:
    """Parameters (p, k) of the base field GF(q), q = p^k."""

    p: int
    k: int = 1

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def q2(self) -> int:
        q = self.q
        return q * q

    def validate(self) -> None:
        if self.k < 1:
            raise DomainError(f"exponent k must be >= 1, got {self.k}")
        if not _is_prime(self.p):
            raise DomainError(f"p must be prime, got {self.p}")

    @classmethod
    def from_order(cls, q: int) -> "FieldSpec":
        """Factor a prime power q = p^k; reject anything else."""
        if q < 2:
            raise DomainError(f"q must be a prime power >= 2, got {q}")
        p = _smallest_prime_factor(q)
        k = 0
        m = q
        while m % p == 0:
            m //= p
            k += 1
        if m != 1:
            raise DomainError(f"q must be a prime power, got {q}")
        return cls(p, k)


class QuadraticRoots(NamedTuple):
    """Distinct roots of a quadratic, plus whether the root is repeated."""

    roots: tuple[int, ...]
    repeated: bool


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _smallest_prime_factor(n: int) -> int:
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomial helpers over GF(p), coefficients ascending ----------------

def _poly_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    # m is monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_trim(a)


def _poly_divisible(a: list[int], d: list[int], p: int) -> bool:
    return not _poly_mod(a, _monic(d, p), p)


def _monic(c: list[int], p: int) -> list[int]:
    inv = pow(c[-1], p - 2, p) if c[-1] != 1 else 1
    return [(x * inv) % p for x in c]


def _index_to_coeffs(i: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(i % p)
        i //= p
    return out


def _coeffs_to_index(c: Iterable[int], p: int) -> int:
    out = 0
    for d in reversed(list(c)):
        out = out * p + d
    return out


def _first_irreducible(p: int, degree: int) -> list[int]:
    """First monic irreducible of the given degree over GF(p).

    Scan order: the lower-coefficient tuple (c_{degree-1}, ..., c_0) read
    as a base-p number, ascending.  Irreducibility by trial division
    against every monic polynomial of degree <= degree // 2.
    """
    divisors = []
    for d in range(1, degree // 2 + 1):
        for i in range(p ** d):
            divisors.append(_index_to_coeffs(i, p, d) + [1])
    for i in range(p ** degree):
        cand = _index_to_coeffs(i, p, degree) + [1]
        if all(not _poly_divisible(cand, d, p) for d in divisors):
            return cand
    raise AssertionError(f"no irreducible of degree {degree} over GF({p})")


class FieldContext:
    """Immutable arithmetic context for GF(q^2) with subfield GF(q).

    Construct via :func:`build_field`; everything here is a pure function
    of the construction parameters, so a context is safe to share across
    workers.
    """

    def __init__(self, spec: FieldSpec, *, max_order: int = DEFAULT_MAX_ORDER,
                 table_limit: int = DEFAULT_TABLE_LIMIT) -> None:
        spec.validate()
        if spec.q2 > max_order:
            raise CapacityError(
                f"q^2 = {spec.q2} exceeds the configured bound {max_order}")
        self.spec = spec
        self.p = spec.p
        self.k = spec.k
        self.q = spec.q
        self.q2 = spec.q2
        self.n = self.q2 - 1   # order of the multiplicative group
        self.table_limit = table_limit

        width = 2 * self.k
        self.modulus = tuple(_first_irreducible(self.p, width))
        self._digits = [tuple(_index_to_coeffs(i, self.p, width))
                        for i in range(self.q2)]

        self.generator = self._find_generator()
        self._build_exp_log()
        self._build_unary_tables()
        self._build_numpy_tables()
        self._build_square_tables()

    # -- construction ------------------------------------------------

    def _mul_bootstrap(self, x: int, y: int) -> int:
        """Polynomial product mod modulus; used only to build the tables."""
        a = _poly_trim(list(self._digits[x]))
        b = _poly_trim(list(self._digits[y]))
        r = _poly_mod(_poly_mul(a, b, self.p), list(self.modulus), self.p)
        return _coeffs_to_index(r + [0] * (2 * self.k - len(r)), self.p)

    def _pow_bootstrap(self, x: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_bootstrap(r, x)
            x = self._mul_bootstrap(x, x)
            e >>= 1
        return r

    def _find_generator(self) -> int:
        checks = [self.n // f for f in _prime_factors(self.n)]
        for g in range(2, self.q2):
            if all(self._pow_bootstrap(g, e) != 1 for e in checks):
                return g
        raise AssertionError("no generator found; tables are inconsistent")

    def _build_exp_log(self) -> None:
        n = self.n
        exp = [0] * (2 * n)
        log = [0] * self.q2   # log[0] stays 0 as an in-bounds sentinel
        x = 1
        for j in range(n):
            exp[j] = x
            exp[j + n] = x
            log[x] = j
            x = self._mul_bootstrap(x, self.generator)
        if x != 1:
            raise AssertionError("generator order mismatch")
        self._exp = exp
        self._log = log

    def _build_unary_tables(self) -> None:
        p, n, q = self.p, self.n, self.q
        exp, log = self._exp, self._log
        frob = [0] * self.q2
        norm = [0] * self.q2
        for x in range(1, self.q2):
            j = log[x]
            frob[x] = exp[(j * q) % n]
            norm[x] = exp[(j * (q + 1)) % n]
        self._frob = frob
        self._norm = norm
        neg = [0] * self.q2
        if p == 2:
            for x in range(self.q2):
                neg[x] = x
        else:
            for x in range(self.q2):
                neg[x] = _coeffs_to_index([(-d) % p for d in self._digits[x]], p)
        self._neg = neg
        self.subfield = tuple(x for x in range(self.q2) if frob[x] == x)
        if len(self.subfield) != q:
            raise AssertionError("frobenius fixed set has wrong size")

    def _build_numpy_tables(self) -> None:
        q2, n = self.q2, self.n
        self.np_exp = np.array(self._exp, dtype=np.int64)
        self.np_log = np.array(self._log, dtype=np.int64)
        self.np_frob = np.array(self._frob, dtype=np.int64)
        self.np_norm = np.array(self._norm, dtype=np.int64)
        self.np_neg = np.array(self._neg, dtype=np.int64)
        self._digit_mat = np.array(self._digits, dtype=np.int64)
        self._digit_pows = np.array([self.p ** i for i in range(2 * self.k)],
                                    dtype=np.int64)
        if q2 <= self.table_limit:
            idx = np.arange(q2, dtype=np.int64)
            logs = self.np_log[idx]
            step = max(1, (1 << 22) // q2)   # bound the transient row blocks
            mul_rows, add_rows = [], []
            for lo in range(0, q2, step):
                hi = min(lo + step, q2)
                block = self.np_exp[(logs[lo:hi, None] + logs[None, :]) % n]
                block[:, 0] = 0
                if lo == 0:
                    block[0, :] = 0
                mul_rows.append(block.astype(np.uint16))
                if self.p == 2:
                    add_rows.append((idx[lo:hi, None] ^ idx[None, :]).astype(np.uint16))
                else:
                    d = self._digit_mat
                    s = ((d[lo:hi, None, :] + d[None, :, :]) % self.p) @ self._digit_pows
                    add_rows.append(s.astype(np.uint16))
            self.np_mul_flat = np.concatenate(mul_rows).ravel()
            self.np_add_flat = np.concatenate(add_rows).ravel()
        else:
            self.np_mul_flat = None
            self.np_add_flat = None

    def _build_square_tables(self) -> None:
        sqrt = [-1] * self.q2
        exp, n = self._exp, self.n
        sqrt[0] = 0
        for j in range(n):
            r = exp[j]
            s = exp[(2 * j) % n]
            if sqrt[s] < 0 or r < sqrt[s]:
                sqrt[s] = r
        self._sqrt = sqrt
        self._subfield_squares = frozenset(
            self.mul(v, v) for v in self.subfield if v != 0)
        if self.p == 2:
            asr = [-1] * self.q2
            for y in range(self.q2):
                z = self.mul(y, y) ^ y
                if asr[z] < 0 or y < asr[z]:
                    asr[z] = y
            self._artin_schreier = asr
        else:
            self._artin_schreier = None

    # -- scalar arithmetic --------------------------------------------

    def add(self, x: int, y: int) -> int:
        if self.p == 2:
            return x ^ y
        p = self.p
        dx, dy = self._digits[x], self._digits[y]
        out = 0
        for i in range(2 * self.k - 1, -1, -1):
            out = out * p + (dx[i] + dy[i]) % p
        return out

    def neg(self, x: int) -> int:
        return self._neg[x]

    def sub(self, x: int, y: int) -> int:
        return self.add(x, self._neg[y])

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return self._exp[self._log[x] + self._log[y]]

    def inv(self, x: int) -> int:
        if x == 0:
            raise DomainError("division by zero")
        return self._exp[self.n - self._log[x]] if self._log[x] else 1

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            if e > 0:
                return 0
            if e == 0:
                return 1
            raise DomainError("negative power of zero")
        return self._exp[(self._log[x] * e) % self.n]

    def frobenius(self, x: int) -> int:
        """The relative Frobenius x -> x^q; an involution fixing GF(q)."""
        return self._frob[x]

    def norm(self, x: int) -> int:
        """The norm x -> x^(q+1) into the subfield GF(q)."""
        return self._norm[x]

    def in_subfield(self, x: int) -> bool:
        return self._frob[x] == x

    def absolute_trace(self, x: int) -> int:
        """Trace of GF(q^2) down to the prime field GF(p), as an index < p."""
        t = 0
        y = x
        for _ in range(2 * self.k):
            t = self.add(t, y)
            y = self.mul(y, y) if self.p == 2 else self.pow(y, self.p)
        return t

    # -- squares and quadratics ----------------------------------------

    def square_class(self, u: int) -> int:
        """1, 0 or -1 for a nonzero square, zero, or nonsquare of GF(q).

        Only meaningful in odd characteristic; squareness is relative to
        the subfield GF(q), not to GF(q^2).
        """
        if self.p == 2:
            raise CharacteristicError("square classes need odd q")
        if not self.in_subfield(u):
            raise DomainError(f"element {u} is not in the subfield GF({self.q})")
        if u == 0:
            return 0
        return 1 if u in self._subfield_squares else -1

    def legendre(self, u: int) -> int:
        """Square class of u in GF(q) by the power criterion u^((q-1)/2)."""
        if self.p == 2:
            raise CharacteristicError("the power criterion needs odd q")
        if not self.in_subfield(u):
            raise DomainError(f"element {u} is not in the subfield GF({self.q})")
        if u == 0:
            return 0
        e = self.pow(u, (self.q - 1) // 2)
        if e == 1:
            return 1
        if e == self._neg[1]:
            return -1
        raise AssertionError(f"u^((q-1)/2) = {e} is not a sign")

    def sqrt(self, z: int) -> int | None:
        """Smallest square root of z in GF(q^2), or None."""
        r = self._sqrt[z]
        return None if r < 0 else r

    def sqrt_tonelli_shanks(self, z: int) -> int | None:
        """Square root by Tonelli-Shanks, independent of the square table.

        Only for odd characteristic (even characteristic squaring is a
        bijection and has no residue question).  Returns the smaller of
        the two roots, or None for a nonsquare.
        """
        if self.p == 2:
            raise CharacteristicError("Tonelli-Shanks needs odd characteristic")
        if z == 0:
            return 0
        n = self.n
        if self.pow(z, n // 2) != 1:
            return None
        m, e = n, 0
        while m % 2 == 0:
            m //= 2
            e += 1
        for w in range(2, self.q2):
            if self.pow(w, n // 2) != 1:
                break
        c = self.pow(w, m)
        r = self.pow(z, (m + 1) // 2)
        t = self.pow(z, m)
        while t != 1:
            t2, i = t, 0
            while t2 != 1:
                t2 = self.mul(t2, t2)
                i += 1
            b = c
            for _ in range(e - i - 1):
                b = self.mul(b, b)
            r = self.mul(r, b)
            c = self.mul(b, b)
            t = self.mul(t, c)
            e = i
        return min(r, self._neg[r])

    def solve_quadratic(self, a2: int, a1: int, a0: int) -> QuadraticRoots:
        """All roots in GF(q^2) of a2*X^2 + a1*X + a0, a2 != 0."""
        if a2 == 0:
            raise DomainError("leading coefficient is zero")
        if self.p != 2:
            disc = self.sub(self.mul(a1, a1),
                            self.mul(self.mul(4 % self.p, a2), a0))
            r = self.sqrt(disc)
            if r is None:
                return QuadraticRoots((), False)
            inv2a = self.inv(self.add(a2, a2))
            if disc == 0:
                return QuadraticRoots((self.mul(self._neg[a1], inv2a),), True)
            x1 = self.mul(self.add(self._neg[a1], r), inv2a)
            x2 = self.mul(self.sub(self._neg[a1], r), inv2a)
            return QuadraticRoots(tuple(sorted((x1, x2))), False)
        if a1 == 0:
            # X^2 = a0/a2; squaring is a bijection in characteristic 2
            c = self.div(a0, a2)
            root = self.pow(c, self.q2 // 2) if c else 0
            return QuadraticRoots((root,), True)
        # substitute X = (a1/a2) Y: Y^2 + Y = a2*a0/a1^2
        c = self.div(self.mul(a2, a0), self.mul(a1, a1))
        y = self._artin_schreier[c]
        if y < 0:
            return QuadraticRoots((), False)
        scale = self.div(a1, a2)
        x1 = self.mul(scale, y)
        x2 = self.mul(scale, y ^ 1)
        return QuadraticRoots(tuple(sorted((x1, x2))), False)

    # -- element ranges -------------------------------------------------

    def elements(self) -> range:
        return range(self.q2)

    def units(self) -> range:
        return range(1, self.q2)

    # -- bulk numpy arithmetic -------------------------------------------

    def mul_column(self, c: int) -> np.ndarray:
        """Vector of x*c over all indices x, for bulk gathers."""
        if c == 0:
            return np.zeros(self.q2, dtype=np.int64)
        col = self.np_exp[(self.np_log + self._log[c]) % self.n]
        col[0] = 0
        return col

    def mul_arr(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.np_mul_flat is not None:
            return self.np_mul_flat.take(x * np.int64(self.q2) + y).astype(np.int64)
        out = self.np_exp[(self.np_log.take(x) + self.np_log.take(y)) % self.n]
        out[(x == 0) | (y == 0)] = 0
        return out

    def add_arr(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return x ^ y
        if self.np_add_flat is not None:
            return self.np_add_flat.take(x * np.int64(self.q2) + y).astype(np.int64)
        d = (self._digit_mat.take(x, axis=0) + self._digit_mat.take(y, axis=0)) % self.p
        return d @ self._digit_pows

    def frob_arr(self, x: np.ndarray) -> np.ndarray:
        return self.np_frob.take(x)

    def norm_arr(self, x: np.ndarray) -> np.ndarray:
        return self.np_norm.take(x)

    # -- reporting --------------------------------------------------------

    def element_str(self, x: int) -> str:
        """Readable polynomial form of an element, e.g. 'w + 2'."""
        if x == 0:
            return "0"
        terms = []
        for i in range(2 * self.k - 1, -1, -1):
            c = self._digits[x][i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                head = "" if c == 1 else str(c)
                var = "w" if i == 1 else f"w^{i}"
                terms.append(head + var)
        return " + ".join(terms)

    def as_dict(self, *, include_tables: bool = False) -> dict:
        out = {
            "p": self.p,
            "k": self.k,
            "q": self.q,
            "q2": self.q2,
            "modulus_coeffs_ascending": list(self.modulus),
            "generator": self.generator,
            "subfield": list(self.subfield),
        }
        if include_tables:
            out["exp"] = self._exp[: self.n]
            out["log"] = self._log
            out["frobenius"] = self._frob
            out["norm"] = self._norm
        return out

    def __repr__(self) -> str:
        return f"FieldContext(GF({self.q2}) over GF({self.q}), p={self.p}, k={self.k})"


def build_field(spec: FieldSpec, *, max_order: int = DEFAULT_MAX_ORDER,
                table_limit: int = DEFAULT_TABLE_LIMIT) -> FieldContext:
    """Build the arithmetic context for GF(q^2) over GF(q), q = spec.p**spec.k."""
    return FieldContext(spec, max_order=max_order, table_limit=table_limit)


def field_for_order(q: int, **kwargs) -> FieldContext:
    """Build the context for a prime power q given as a plain integer."""
    return build_field(FieldSpec.from_order(q), **kwargs)


def multiplication_rate(ctx: FieldContext, *, size: int = 4_000_000,
                        repeats: int = 5, seed: int = 0) -> float:
    """Sustained bulk multiplications per second on random index arrays."""
    import time

    rng = np.random.default_rng(seed)
    x = rng.integers(0, ctx.q2, size=size, dtype=np.int64)
    y = rng.integers(0, ctx.q2, size=size, dtype=np.int64)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        ctx.mul_arr(x, y)
        best = min(best, time.perf_counter() - t0)
    return size / best
