"""Exact arithmetic in prime-power finite fields.

GF(p^n) elements are coefficient tuples (c0, c1, ..., c_{n-1}) for
c0 + c1 x + ... modulo a fixed monic irreducible of degree n.  The modulus
is the irreducible whose integer encoding sum(c_i p^i) is smallest, so a
field is reproducible from (p, n) alone.  Everything is integer arithmetic;
no floats enter at any point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if k % q == 0:
            return k == q
    # deterministic Miller-Rabin, valid far beyond 64 bits with these bases
    d, r = k - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, k)
        if x in (1, k - 1):
            continue
        for _ in range(r - 1):
            x = x * x % k
            if x == k - 1:
                break
        else:
            return False
    return True


def _pollard_rho(k: int, budget: int) -> int | None:
    if k % 2 == 0:
        return 2
    for c in range(1, 20):
        x = y = 2
        d = 1
        steps = 0
        while d == 1:
            if steps > budget:
                return None
            x = (x * x + c) % k
            y = (y * y + c) % k
            y = (y * y + c) % k
            d = math.gcd(abs(x - y), k)
            steps += 1
        if d != k:
            return d
    return None


def factorint(k: int, budget: int = 10 ** 6) -> dict[int, int]:
    """Prime factorization by trial division then Pollard rho.

    Raises ValueError when a cofactor resists the rho budget; callers fall
    back to direct methods rather than accept a partial answer."""
    if k < 1:
        raise ValueError("factorint needs a positive integer")
    out: dict[int, int] = {}
    for q in range(2, 10 ** 4):
        while k % q == 0:
            out[q] = out.get(q, 0) + 1
            k //= q
        if k == 1:
            return out
    stack = [k]
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_prime(v):
            out[v] = out.get(v, 0) + 1
            continue
        d = _pollard_rho(v, budget)
        if d is None or d == v:
            raise ValueError(f"factorization budget exceeded on cofactor {v}")
        stack.extend([d, v // d])
    return out


def multiplicative_order(a: int, modulus: int) -> int:
    """Order of a in (Z/modulus)^*."""
    if math.gcd(a, modulus) != 1:
        raise ValueError(f"{a} is not a unit mod {modulus}")
    if modulus == 1:
        return 1
    group = _group_exponent(modulus)
    t = group
    for q in factorint(group):
        while t % q == 0 and pow(a, t // q, modulus) == 1:
            t //= q
    return t


@lru_cache(maxsize=None)
def _group_exponent(modulus: int) -> int:
    lam = 1
    for q, e in factorint(modulus).items():
        if q == 2 and e > 2:
            part = 2 ** (e - 2)
        else:
            part = (q - 1) * q ** (e - 1)
        lam = lam * part // math.gcd(lam, part)
    return lam


def _poly_trim(c: tuple[int, ...]) -> tuple[int, ...]:
    i = len(c)
    while i and c[i - 1] == 0:
        i -= 1
    return c[:i]


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(tuple(out))


def _poly_mod(a, f, p):
    a = list(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    for i in range(len(a) - 1, df - 1, -1):
        coef = a[i] * inv_lead % p
        if coef:
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - coef * f[j]) % p
    return _poly_trim(tuple(a))


def _poly_powmod(a, e, f, p):
    result = (1,)
    base = _poly_mod(a, f, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), f, p)
        base = _poly_mod(_poly_mul(base, base, p), f, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _poly_sub(a, b, p):
    m = max(len(a), len(b))
    a = a + (0,) * (m - len(a))
    b = b + (0,) * (m - len(b))
    return _poly_trim(tuple((x - y) % p for x, y in zip(a, b)))


def _is_irreducible(f: tuple[int, ...], p: int) -> bool:
    n = len(f) - 1
    x = (0, 1)
    if _poly_powmod(x, p ** n, f, p) != x:
        return False
    for q in factorint(n):
        g = _poly_sub(_poly_powmod(x, p ** (n // q), f, p), x, p)
        if len(_poly_gcd(f, g, p)) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, n: int) -> tuple[int, ...]:
    """Monic irreducible of degree n over F_p with least integer encoding."""
    if n == 1:
        return (0, 1)
    for code in range(p ** n):
        coeffs = tuple((code // p ** i) % p for i in range(n)) + (1,)
        if _is_irreducible(coeffs, p):
            return coeffs
    raise RuntimeError("no irreducible found")  # unreachable


class GF:
    """The field GF(p^n) with its canonical modulus."""

    def __init__(self, p: int, n: int = 1):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if n < 1:
            raise ValueError("extension degree must be >= 1")
        self.p = p
        self.n = n
        self.order = p ** n
        self.modulus = default_modulus(p, n)

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    def __repr__(self):
        return f"GF({self.p}^{self.n})" if self.n > 1 else f"GF({self.p})"

    def el(self, coeffs) -> "GFElem":
        if isinstance(coeffs, GFElem):
            if coeffs.field != self:
                raise ValueError("element from a different field")
            return coeffs
        if isinstance(coeffs, int):
            coeffs = (coeffs,)
        c = _poly_mod(tuple(v % self.p for v in coeffs), self.modulus, self.p)
        return GFElem(self, c)

    @property
    def zero(self) -> "GFElem":
        return GFElem(self, ())

    @property
    def one(self) -> "GFElem":
        return GFElem(self, (1,))

    @property
    def gen(self) -> "GFElem":
        """The class of x, a root of the modulus."""
        return self.el((0, 1))

    def elements(self):
        for code in range(self.order):
            yield self.el(tuple((code // self.p ** i) % self.p for i in range(self.n)))

    def multiplicative_generator(self) -> "GFElem":
        target = self.order - 1
        primes = list(factorint(target))
        for cand in self.elements():
            if not cand:
                continue
            if all(cand ** (target // q) != self.one for q in primes):
                return cand
        raise RuntimeError("no generator found")  # unreachable

    def roots_of_unity(self, ell: int) -> list["GFElem"]:
        """All solutions of x^ell = 1; requires ell | p^n - 1."""
        if (self.order - 1) % ell:
            raise ValueError(f"no full set of {ell}-th roots in {self}")
        w = self.multiplicative_generator() ** ((self.order - 1) // ell)
        return [w ** k for k in range(ell)]


@dataclass(frozen=True)
class GFElem:
    field: GF
    coeffs: tuple[int, ...]

    def _lift(self, other) -> "GFElem":
        if isinstance(other, GFElem):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, int):
            return self.field.el(other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        p = self.field.p
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = tuple((x + y) % p for x, y in zip(a, b)) + a[len(b):]
        return GFElem(self.field, _poly_trim(out))

    __radd__ = __add__

    def __neg__(self):
        return GFElem(self.field, tuple(-c % self.field.p for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        f = self.field
        return GFElem(f, _poly_mod(_poly_mul(self.coeffs, o.coeffs, f.p), f.modulus, f.p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        f = self.field
        return GFElem(f, _poly_powmod(self.coeffs, e, f.modulus, f.p))

    def inverse(self) -> "GFElem":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        # x^(q-2) = x^(-1) in GF(q)
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.el(other)
        return (
            isinstance(other, GFElem)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                base = "x" if i == 1 else f"x^{i}"
                terms.append(base if c == 1 else f"{c}{base}")
        return "+".join(terms)

    def order(self) -> int:
        """Multiplicative order."""
        if not self:
            raise ValueError("zero has no multiplicative order")
        t = self.field.order - 1
        one = self.field.one
        for q in factorint(t):
            while t % q == 0 and self ** (t // q) == one:
                t //= q
        return t

    def in_prime_field(self) -> int | None:
        """The integer representative when the element lies in F_p."""
        if len(self.coeffs) <= 1:
            return self.coeffs[0] if self.coeffs else 0
        return None
