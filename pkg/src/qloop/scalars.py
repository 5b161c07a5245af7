"""Scalar arithmetic for modules at a root of unity.

Two interchangeable backends provide the scalar field:

* :class:`ExactBackend` -- the cyclotomic field Q(eps) with eps a primitive
  l-th root of unity (l odd, l >= 3), represented as Q[x]/Phi_l(x).  Elements
  are :class:`CycScalar` values: coefficient tuples of length deg Phi_l in
  the power basis 1, eps, ..., eps^(deg-1), always reduced to canonical form
  so equality and zero-testing are exact coefficient comparisons.
  Coefficients are arbitrary-precision rationals (plain ``int`` where the
  denominator is 1, :class:`fractions.Fraction` otherwise); no floating
  point ever enters this backend.

* :class:`FloatBackend` -- complex floating point with eps := exp(2*pi*i/l)
  (principal branch; this choice is a documented convention, not canonical)
  and tolerance-based equality.  It accepts arbitrary complex parameters,
  which the exact backend cannot express.

Both backends expose the same operation set: eps_pow (integer, rational and,
for the float backend, complex exponents), the q-deformed integers
[r] = (eps^r - eps^-r)/(eps - eps^-1), q-factorials and q-binomials, and
construction/serialization helpers.  Code built on top only manipulates
scalars through a backend plus the arithmetic operators, so every module in
this package runs identically on either field.

Fractional powers eps^(p/q) in the exact backend are defined as
eps^(p * q^-1 mod l), the unique l-th root of unity whose q-th power is
eps^p; this needs gcd(q, l) = 1 and raises
:class:`~qloop.errors.NonInvertibleDenominatorError` otherwise.

q-binomials are computed by expanding numerator and denominator as integer
Laurent polynomials in a generic deformation parameter and dividing exactly
*before* specializing to eps, so vanishing q-integers at roots of unity
never cause a division by zero.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache

from .errors import NonInvertibleDenominatorError

Rational = int | Fraction


@lru_cache(maxsize=None)
def cyclotomic_polynomial(l: int) -> tuple[int, ...]:
    """Coefficients of the l-th cyclotomic polynomial Phi_l, ascending degree.

    Computed by exact integer division: Phi_l = (x^l - 1) / prod of Phi_d
    over proper divisors d of l.  For prime l this yields 1 + x + ... +
    x^(l-1).
    """
    if l < 1:
        raise ValueError(f"cyclotomic polynomial needs l >= 1, got {l}")
    if l == 1:
        return (-1, 1)
    poly = [-1] + [0] * (l - 1) + [1]  # x^l - 1
    for d in range(1, l):
        if l % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    """Divide integer polynomials with zero remainder; divisor must be monic."""
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    num = list(num)
    quot = [0] * (len(num) - len(den) + 1)
    for k in range(len(quot) - 1, -1, -1):
        c = num[k + len(den) - 1]
        quot[k] = c
        if c:
            for t, dt in enumerate(den):
                num[k + t] -= c * dt
    if any(num[: len(den) - 1]):
        raise ValueError("division left a remainder")
    return quot


def _norm_coeff(c: Rational) -> Rational:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class CycScalar:
    """An element of Q(eps), canonically reduced modulo Phi_l.

    Immutable; supports +, -, *, /, ** (integer exponents), unary -, ==, and
    hashing.  Mixed arithmetic with ``int`` and ``Fraction`` coerces the
    rational into the field.
    """

    __slots__ = ("backend", "coeffs")

    def __init__(self, backend: "ExactBackend", coeffs: tuple[Rational, ...]):
        self.backend = backend
        self.coeffs = coeffs

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CycScalar(
            self.backend,
            tuple(_norm_coeff(a + b) for a, b in zip(self.coeffs, other.coeffs)),
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CycScalar(
            self.backend,
            tuple(_norm_coeff(a - b) for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return CycScalar(self.backend, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, CycScalar):
            return CycScalar(self.backend, self.backend._mul(self.coeffs, other.coeffs))
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.backend.zero
            return CycScalar(self.backend, tuple(_norm_coeff(a * other) for a in self.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        acc = self.backend.one
        for bit in bin(abs(e))[2:]:
            acc = acc * acc
            if bit == "1":
                acc = acc * base
        return acc

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.backend.l, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def _coerce(self, other):
        if isinstance(other, CycScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return self.backend.from_rational(other)
        return NotImplemented

    def inverse(self) -> "CycScalar":
        """Multiplicative inverse; raises ZeroDivisionError on zero."""
        if not any(self.coeffs):
            raise ZeroDivisionError("inverse of zero in Q(eps)")
        return CycScalar(self.backend, self.backend._inv(self.coeffs))

    def __repr__(self):
        return f"CycScalar(l={self.backend.l}, {self.to_string()!r})"

    def to_string(self) -> str:
        """Render as a sum of rational multiples of eps powers, e.g. '1 - 2*eps^2'."""
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mag = -c if c < 0 else c
            if k == 0:
                body = str(mag)
            elif mag == 1:
                body = "eps" if k == 1 else f"eps^{k}"
            else:
                body = f"{mag}*eps" if k == 1 else f"{mag}*eps^{k}"
            parts.append(("-" if c < 0 else "+", body))
        if not parts:
            return "0"
        sign, body = parts[0]
        text = body if sign == "+" else "-" + body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


class ExactBackend:
    """Exact arithmetic in Q(eps) = Q[x]/Phi_l(x) for a primitive l-th root eps."""

    name = "exact"
    is_exact = True

    def __init__(self, l: int):
        if l < 3 or l % 2 == 0:
            raise ValueError(f"root order must be odd and >= 3, got {l}")
        self.l = l
        self.modulus = cyclotomic_polynomial(l)
        self.degree = len(self.modulus) - 1
        # Reduction rows: x^(degree + t) mod Phi_l for t = 0 .. degree-2,
        # enough to reduce any product of two canonical representatives.
        rows = []
        row = [-c for c in self.modulus[: self.degree]]
        rows.append(tuple(row))
        for _ in range(self.degree - 2):
            top = row[-1]
            row = [0] + row[:-1]
            if top:
                row = [r + top * h for r, h in zip(row, rows[0])]
            rows.append(tuple(row))
        self._reduction_rows = rows
        self.zero = CycScalar(self, (0,) * self.degree)
        self.one = CycScalar(self, (1,) + (0,) * (self.degree - 1))
        self._eps_powers = self._build_eps_powers()
        self.eps = self._eps_powers[1 % l]
        self._qint_cache: dict[int, CycScalar] = {}

    def _build_eps_powers(self) -> list[CycScalar]:
        powers = [self.one]
        x = (0, 1) + (0,) * (self.degree - 2) if self.degree >= 2 else self._reduction_rows[0]
        cur = self.one.coeffs
        for _ in range(self.l - 1):
            cur = self._mul(cur, x)
            powers.append(CycScalar(self, cur))
        return powers

    def _mul(self, a: tuple, b: tuple) -> tuple:
        deg = self.degree
        prod = [0] * (2 * deg - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        out = prod[:deg]
        for t in range(deg, 2 * deg - 1):
            c = prod[t]
            if c:
                row = self._reduction_rows[t - deg]
                for k, rk in enumerate(row):
                    if rk:
                        out[k] += c * rk
        return tuple(_norm_coeff(c) for c in out)

    def _inv(self, a: tuple) -> tuple:
        # Extended Euclid in Q[x] against the (irreducible) modulus.
        r0 = [Fraction(c) for c in self.modulus]
        r1 = [Fraction(c) for c in a]
        _trim(r1)
        s0, s1 = [], [Fraction(1)]
        while True:
            if len(r1) == 1:
                g = r1[0]
                inv = [c / g for c in s1]
                inv += [Fraction(0)] * (self.degree - len(inv))
                return tuple(_norm_coeff(c) for c in inv[: self.degree])
            q, rem = _polydivmod_frac(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _polysub_frac(s0, _polymul_frac(q, s1))

    # -- construction -------------------------------------------------

    def from_rational(self, x: Rational) -> CycScalar:
        x = _norm_coeff(x if isinstance(x, (int, Fraction)) else Fraction(x))
        return CycScalar(self, (x,) + (0,) * (self.degree - 1))

    def from_int(self, k: int) -> CycScalar:
        return self.from_rational(k)

    def eps_pow(self, e) -> CycScalar:
        """eps^e for an integer or rational exponent.

        Rational e = p/q (lowest terms) requires gcd(q, l) = 1 and means
        eps^(p * q^-1 mod l).
        """
        if isinstance(e, int):
            return self._eps_powers[e % self.l]
        if isinstance(e, Fraction):
            q = e.denominator
            if q == 1:
                return self._eps_powers[e.numerator % self.l]
            try:
                qinv = pow(q, -1, self.l)
            except ValueError:
                raise NonInvertibleDenominatorError(
                    f"eps^({e}) undefined: gcd({q}, {self.l}) != 1"
                ) from None
            return self._eps_powers[(e.numerator * qinv) % self.l]
        raise TypeError(f"exact backend needs an integer or rational exponent, got {type(e).__name__}")

    # -- q-analogues ---------------------------------------------------

    def q_int(self, r: int) -> CycScalar:
        """[r] = (eps^r - eps^-r)/(eps - eps^-1), an integer combination of eps powers."""
        if not isinstance(r, int):
            raise TypeError("exact backend needs integer q-integer arguments")
        r = r % self.l
        cached = self._qint_cache.get(r)
        if cached is None:
            # [r] = eps^(r-1) + eps^(r-3) + ... + eps^(1-r): no division needed.
            acc = self.zero
            for k in range(r):
                acc = acc + self._eps_powers[(r - 1 - 2 * k) % self.l]
            cached = self._qint_cache[r] = acc
        return cached

    def q_factorial(self, m: int) -> CycScalar:
        if m < 0:
            raise ValueError("q-factorial needs a nonnegative argument")
        acc = self.one
        for k in range(2, m + 1):
            acc = acc * self.q_int(k)
        return acc

    def q_binomial(self, r: int, m: int) -> CycScalar:
        """Gaussian binomial [r; m] evaluated at eps.

        Expanded as a Laurent polynomial in a generic parameter and divided
        exactly before specialization, so it is well defined even when
        lower q-integers vanish at eps.
        """
        if m < 0:
            raise ValueError("q-binomial needs m >= 0")
        if m == 0:
            return self.one
        num = _LAURENT_ONE
        for k in range(m):
            num = _laurent_mul(num, _laurent_qint(r - k))
        den = _LAURENT_ONE
        for k in range(1, m + 1):
            den = _laurent_mul(den, _laurent_qint(k))
        quot = _laurent_div_exact(num, den)
        offset, coeffs = quot
        acc = self.zero
        for t, c in enumerate(coeffs):
            if c:
                acc = acc + c * self._eps_powers[(offset + t) % self.l]
        return acc

    # -- predicates and conversions -------------------------------------

    def is_zero(self, x) -> bool:
        if isinstance(x, (int, Fraction)):
            return not x
        return not any(x.coeffs)

    def eq(self, x, y) -> bool:
        if isinstance(x, (int, Fraction)):
            x = self.from_rational(x)
        return self.is_zero(x - y)

    def inv(self, x: CycScalar) -> CycScalar:
        return x.inverse()

    def embed(self, x: CycScalar) -> complex:
        """Numerical value of x under eps -> exp(2*pi*i/l)."""
        eps = cmath.exp(2j * cmath.pi / self.l)
        acc = 0j
        for k, c in enumerate(x.coeffs):
            if c:
                acc += (c.numerator / c.denominator if isinstance(c, Fraction) else c) * eps**k
        return acc

    def serialize(self, x: CycScalar) -> dict:
        """JSON form {"l": l, "coeffs": [[num, den], ...]} with decimal strings."""
        coeffs = []
        for c in x.coeffs:
            f = Fraction(c)
            coeffs.append([str(f.numerator), str(f.denominator)])
        return {"l": self.l, "coeffs": coeffs}

    def deserialize(self, data: dict) -> CycScalar:
        if data["l"] != self.l:
            raise ValueError(f"scalar has root order {data['l']}, backend has {self.l}")
        coeffs = data["coeffs"]
        if len(coeffs) != self.degree:
            raise ValueError("coefficient list has the wrong length")
        return CycScalar(
            self, tuple(_norm_coeff(Fraction(int(n), int(d))) for n, d in coeffs)
        )

    def describe(self) -> dict:
        return {"name": self.name, "l": self.l}

    def __repr__(self):
        return f"ExactBackend(l={self.l})"


class FloatBackend:
    """Complex floating-point scalars with eps := exp(2*pi*i/l).

    Equality and zero tests use a mixed absolute/relative tolerance.  Powers
    eps^z for arbitrary complex z use the principal branch exp(2*pi*i*z/l);
    this convention is documented in reports rather than assumed canonical.
    """

    name = "float"
    is_exact = False

    def __init__(self, l: int, tolerance: float = 1e-10):
        if l < 3 or l % 2 == 0:
            raise ValueError(f"root order must be odd and >= 3, got {l}")
        self.l = l
        self.tolerance = tolerance
        self.zero = 0j
        self.one = 1 + 0j
        self.eps = cmath.exp(2j * cmath.pi / l)

    def from_rational(self, x) -> complex:
        return complex(x)

    from_int = from_rational

    def eps_pow(self, e) -> complex:
        if isinstance(e, Fraction):
            e = e.numerator / e.denominator
        return cmath.exp(2j * cmath.pi * complex(e) / self.l)

    def q_int(self, r) -> complex:
        num = self.eps_pow(r) - self.eps_pow(-r if isinstance(r, (int, float)) else -1 * r)
        return num / (self.eps - 1 / self.eps)

    def q_factorial(self, m: int) -> complex:
        if m < 0:
            raise ValueError("q-factorial needs a nonnegative argument")
        acc = self.one
        for k in range(2, m + 1):
            acc *= self.q_int(k)
        return acc

    def q_binomial(self, r: int, m: int) -> complex:
        if m < 0:
            raise ValueError("q-binomial needs m >= 0")
        if m == 0:
            return self.one
        num = _LAURENT_ONE
        for k in range(m):
            num = _laurent_mul(num, _laurent_qint(r - k))
        den = _LAURENT_ONE
        for k in range(1, m + 1):
            den = _laurent_mul(den, _laurent_qint(k))
        offset, coeffs = _laurent_div_exact(num, den)
        return sum(c * self.eps_pow(offset + t) for t, c in enumerate(coeffs) if c)

    def is_zero(self, x) -> bool:
        return abs(x) <= self.tolerance

    def eq(self, x, y) -> bool:
        return abs(x - y) <= self.tolerance * max(1.0, abs(x), abs(y))

    def inv(self, x) -> complex:
        if self.is_zero(x):
            raise ZeroDivisionError("inverse of (numerically) zero scalar")
        return 1 / x

    def embed(self, x) -> complex:
        return complex(x)

    def serialize(self, x) -> dict:
        z = complex(x)
        return {"re": repr(z.real), "im": repr(z.imag)}

    def deserialize(self, data: dict) -> complex:
        return complex(float(data["re"]), float(data["im"]))

    def describe(self) -> dict:
        return {
            "name": self.name,
            "l": self.l,
            "tolerance": self.tolerance,
            "float_epsilon": "exp(2*pi*i/l)",
        }

    def __repr__(self):
        return f"FloatBackend(l={self.l}, tolerance={self.tolerance})"


Backend = ExactBackend | FloatBackend


def make_backend(name: str, l: int, tolerance: float = 1e-10) -> Backend:
    if name == "exact":
        return ExactBackend(l)
    if name == "float":
        return FloatBackend(l, tolerance)
    raise ValueError(f"unknown backend {name!r} (expected 'exact' or 'float')")


# -- generic-parameter Laurent polynomials (integer coefficients) ----------
#
# Represented as (offset, coeffs): the polynomial sum coeffs[t] * x^(offset+t)
# with coeffs[0] != 0 != coeffs[-1] unless zero.  Only what q-binomials need.

_LAURENT_ONE = (0, (1,))
_LAURENT_ZERO = (0, ())


def _laurent_qint(r: int) -> tuple[int, tuple[int, ...]]:
    if r == 0:
        return _LAURENT_ZERO
    sign = 1 if r > 0 else -1
    r = abs(r)
    # [r] = x^(r-1) + x^(r-3) + ... + x^(1-r)
    coeffs = [0] * (2 * r - 1)
    for k in range(r):
        coeffs[2 * k] = sign
    return (1 - r, tuple(coeffs))


def _laurent_mul(a, b):
    oa, ca = a
    ob, cb = b
    if not ca or not cb:
        return _LAURENT_ZERO
    out = [0] * (len(ca) + len(cb) - 1)
    for i, x in enumerate(ca):
        if x:
            for j, y in enumerate(cb):
                if y:
                    out[i + j] += x * y
    return (oa + ob, tuple(out))


def _laurent_div_exact(num, den):
    """Exact Laurent division; the quotient must have integer coefficients."""
    on, cn = num
    od, cd = den
    if not cd:
        raise ZeroDivisionError("Laurent division by zero")
    if not cn:
        return _LAURENT_ZERO
    if cd[-1] != 1:
        raise ValueError("divisor must have leading coefficient 1")
    work = list(cn)
    quot = [0] * (len(cn) - len(cd) + 1)
    for k in range(len(quot) - 1, -1, -1):
        c = work[k + len(cd) - 1]
        quot[k] = c
        if c:
            for t, dt in enumerate(cd):
                work[k + t] -= c * dt
    if any(work[: len(cd) - 1]):
        raise ValueError("Laurent division left a remainder")
    return (on - od, tuple(quot))


# -- Fraction-coefficient polynomial helpers for the field inverse ---------


def _trim(p: list[Fraction]) -> None:
    while len(p) > 1 and not p[-1]:
        p.pop()


def _polymul_frac(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    _trim(out)
    return out


def _polysub_frac(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    _trim(out)
    return out


def _polydivmod_frac(num: list[Fraction], den: list[Fraction]):
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    if len(num) - 1 < dd:
        return [], num
    quot = [Fraction(0)] * (len(num) - dd)
    for k in range(len(quot) - 1, -1, -1):
        c = num[k + dd] / lead
        quot[k] = c
        if c:
            for t, dt in enumerate(den):
                num[k + t] -= c * dt
    rem = num[:dd] or [Fraction(0)]
    _trim(rem)
    _trim(quot)
    return quot, rem
