"""Triangular-index modules with exact generator actions.

A module of rank n over root order l has dimension l^N, N = n(n+1)/2.
Basis vectors v(m) are labelled by residue tuples m over the triangular
position set {(i, j) : 1 <= i <= j <= n}, stored in lexicographic (i, j)
order; index arithmetic is componentwise mod l.  Vectors are sparse maps
from index tuples to backend scalars with no stored zeros, and generators
act on them directly; nothing here ever materializes an l^N x l^N matrix.

The action depends on parameters (a, b, lambda): a assigns a nonzero scalar
to every triangular position (multiplicatively extended to arbitrary
integer shift vectors), b an integer offset per position, and lambda is an
integer weight vector.  All defining formulas read entries of c := m + b
through a single accessor that returns 0 for out-of-range positions, so
boundary cases need no special-casing at call sites.  The distinguished
parameter point is a = all ones, b = 0.

On the exact backend lambda and b are restricted to integers, which keeps
every deformed-integer argument an integer; generic complex parameters
belong to the float backend.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import rootdata
from .errors import NonInvertibleDenominatorError


@lru_cache(maxsize=None)
def triangle_layout(n: int) -> "TriangleLayout":
    return TriangleLayout(n)


class TriangleLayout:
    """Slot bookkeeping and linear forms for the triangular position set."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"rank must be positive, got {n}")
        self.n = n
        self.positions = tuple((i, j) for i in range(1, n + 1) for j in range(i, n + 1))
        self.size = len(self.positions)
        self._slot = {pos: t for t, pos in enumerate(self.positions)}
        self._unit = {}
        self._raising = {}

    def slot(self, i: int, j: int) -> int:
        if not (1 <= i <= j <= self.n):
            raise IndexError(f"position ({i}, {j}) outside 1 <= i <= j <= {self.n}")
        return self._slot[(i, j)]

    def entry(self, c, i: int, j: int):
        """c_{i,j}, reading 0 for positions outside 1 <= i <= j <= n."""
        if 1 <= i <= j <= self.n:
            return c[self._slot[(i, j)]]
        return 0

    def unit_shift(self, i: int, j: int) -> tuple[int, ...]:
        """The unit vector at position (i, j): the shift of one lowering term."""
        cached = self._unit.get((i, j))
        if cached is None:
            t = self.slot(i, j)
            cached = self._unit[(i, j)] = tuple(
                1 if k == t else 0 for k in range(self.size)
            )
        return cached

    def raising_shift(self, i: int, j: int) -> tuple[int, ...]:
        """Shift vector of the j-th raising term of generator i (1 <= j <= i).

        Equals sum_{k=j+1}^{i} unit(k-1, n-i+k) - sum_{k=j}^{i} unit(k, n-i+k),
        with out-of-range positions contributing nothing.
        """
        cached = self._raising.get((i, j))
        if cached is not None:
            return cached
        if not (1 <= j <= i <= self.n):
            raise IndexError(f"raising shift needs 1 <= j <= i <= {self.n}, got ({i}, {j})")
        shift = [0] * self.size
        n = self.n
        for k in range(j + 1, i + 1):
            p, q = k - 1, n - i + k
            if 1 <= p <= q <= n:
                shift[self._slot[(p, q)]] += 1
        for k in range(j, i + 1):
            p, q = k, n - i + k
            if 1 <= p <= q <= n:
                shift[self._slot[(p, q)]] -= 1
        cached = self._raising[(i, j)] = tuple(shift)
        return cached

    # -- linear forms in the index entries --------------------------------

    def form_m(self, c, i: int, j: int):
        """Lowering-coefficient form at (i, j), i <= j."""
        if not (1 <= i <= j <= self.n):
            raise IndexError(f"form_m needs 1 <= i <= j <= {self.n}, got ({i}, {j})")
        e = self.entry
        total = 0
        for k in range(i - 1, j):
            total += e(c, i, k) - e(c, i - 1, k)
        for k in range(i, j + 1):
            total += e(c, i, k) - e(c, i + 1, k)
        return total

    def form_n(self, c, i: int, j: int):
        """Raising-coefficient form at (i, j), j <= i."""
        if not (1 <= j <= i <= self.n):
            raise IndexError(f"form_n needs 1 <= j <= i <= {self.n}, got ({i}, {j})")
        col = self.n - i + j
        return self.entry(c, j - 1, col) - self.entry(c, j, col)

    def form_mu(self, c, i: int):
        """Torus-exponent form for node i."""
        if not (1 <= i <= self.n):
            raise IndexError(f"form_mu needs 1 <= i <= {self.n}, got {i}")
        e = self.entry
        total = 0
        for k in range(i - 1, self.n + 1):
            total += e(c, i - 1, k)
        for k in range(i, self.n + 1):
            total -= 2 * e(c, i, k)
        for k in range(i + 1, self.n + 1):
            total += e(c, i + 1, k)
        return total

    def row_tail_sum(self, c, i: int):
        """sum_{k=i}^{n} c_{i,k}, the exponent row sum of the i-th extended torus node."""
        e = self.entry
        return sum(e(c, i, k) for k in range(i, self.n + 1))


def lowest_index(n: int, l: int, lam: tuple) -> tuple[int, ...]:
    """Index of the unique lowering-kernel basis vector: windowed weight sums mod l."""
    layout = triangle_layout(n)
    out = []
    for i, j in layout.positions:
        out.append(sum(lam[j - k] for k in range(1, i + 1)) % l)
    return tuple(out)


# -- sparse vector helpers --------------------------------------------------
#
# A vector is a dict {index tuple -> scalar} with no stored zeros.


def vec_accumulate(backend, acc: dict, idx: tuple, coef) -> None:
    cur = acc.get(idx)
    if cur is None:
        acc[idx] = coef
        return
    cur = cur + coef
    if backend.is_zero(cur):
        del acc[idx]
    else:
        acc[idx] = cur


def vec_add(backend, u: dict, v: dict) -> dict:
    out = dict(u)
    for idx, coef in v.items():
        vec_accumulate(backend, out, idx, coef)
    return out


def vec_sub(backend, u: dict, v: dict) -> dict:
    out = dict(u)
    for idx, coef in v.items():
        vec_accumulate(backend, out, idx, -coef)
    return out


def vec_scale(backend, s, v: dict) -> dict:
    if backend.is_zero(s):
        return {}
    return {idx: s * coef for idx, coef in v.items()}


def vec_eq(backend, u: dict, v: dict) -> bool:
    for idx in u.keys() | v.keys():
        if not backend.eq(u.get(idx, backend.zero), v.get(idx, backend.zero)):
            return False
    return True


def vec_is_zero(backend, v: dict) -> bool:
    return all(backend.is_zero(c) for c in v.values())


class SchnizerModule:
    """The l^N-dimensional module V(a, b, lambda) with matrix-free actions."""

    def __init__(self, backend, n: int, lam, a=None, b=None):
        self.backend = backend
        self.n = n
        self.l = backend.l
        self.layout = triangle_layout(n)
        self.lam = tuple(lam)
        if len(self.lam) != n:
            raise ValueError(f"weight vector must have length {n}, got {len(self.lam)}")
        if backend.is_exact and not all(isinstance(x, int) for x in self.lam):
            raise ValueError("exact backend requires integer weight entries")

        size = self.layout.size
        if a is None:
            self.a = (backend.one,) * size
            self._a_trivial = True
        else:
            self.a = self._param_tuple(a, "a")
            for pos, val in zip(self.layout.positions, self.a):
                if backend.is_zero(val):
                    raise ValueError(f"coefficient parameter a{pos} must be nonzero")
            self._a_trivial = all(backend.eq(x, backend.one) for x in self.a)
        if b is None:
            self.b = (0,) * size
        else:
            self.b = self._param_tuple(b, "b")
            if backend.is_exact and not all(isinstance(x, int) for x in self.b):
                raise ValueError("exact backend requires integer offset entries")
        self.dimension = self.l**size
        self._a_char_cache: dict[tuple, object] = {}

    def _param_tuple(self, values, name):
        if isinstance(values, dict):
            missing = [p for p in self.layout.positions if p not in values]
            if missing:
                raise ValueError(f"parameter {name} missing positions {missing}")
            return tuple(values[p] for p in self.layout.positions)
        values = tuple(values)
        if len(values) != self.layout.size:
            raise ValueError(
                f"parameter {name} must have {self.layout.size} entries, got {len(values)}"
            )
        return values

    # -- basis -------------------------------------------------------------

    def basis_indices(self):
        """All index tuples in the documented lexicographic order."""
        return product(range(self.l), repeat=self.layout.size)

    def basis_vector(self, m) -> dict:
        m = self.index(m)
        return {m: self.backend.one}

    def index(self, m) -> tuple[int, ...]:
        m = tuple(m)
        if len(m) != self.layout.size:
            raise ValueError(f"index needs {self.layout.size} entries, got {len(m)}")
        return tuple(x % self.l for x in m)

    def zero_index(self) -> tuple[int, ...]:
        return (0,) * self.layout.size

    def lowest_weight_index(self) -> tuple[int, ...]:
        return lowest_index(self.n, self.l, self.lam)

    def index_position(self, m) -> int:
        """Rank of the index in basis_indices() order."""
        pos = 0
        for x in m:
            pos = pos * self.l + x
        return pos

    def offset(self, m) -> tuple:
        """c = m + b, the entry vector all coefficient forms are evaluated at."""
        return tuple(x + y for x, y in zip(m, self.b))

    def a_char(self, shift: tuple):
        """Multiplicative character of a shift vector: prod a_t^{shift_t}."""
        if self._a_trivial:
            return self.backend.one
        cached = self._a_char_cache.get(shift)
        if cached is None:
            cached = self.backend.one
            for coef, s in zip(self.a, shift):
                if s:
                    cached = cached * coef**s
            self._a_char_cache[shift] = cached
        return cached

    # -- generator actions ---------------------------------------------------

    def act_e(self, i: int, vec: dict) -> dict:
        """Raising generator: terms j = 1..i with shift alpha and coefficient [N](c)."""
        if not (1 <= i <= self.n):
            raise IndexError(f"generator index must lie in 1..{self.n}, got {i}")
        backend = self.backend
        layout = self.layout
        out: dict = {}
        for m, coef in vec.items():
            c = self.offset(m)
            for j in range(1, i + 1):
                q = backend.q_int(layout.form_n(c, i, j))
                if backend.is_zero(q):
                    continue
                shift = layout.raising_shift(i, j)
                term = coef * q * self.a_char(shift)
                target = tuple((x + s) % self.l for x, s in zip(m, shift))
                vec_accumulate(backend, out, target, term)
        return out

    def act_f(self, i: int, vec: dict) -> dict:
        """Lowering generator: terms j = i..n with unit shift and coefficient [M(c) - lambda_i]."""
        if not (1 <= i <= self.n):
            raise IndexError(f"generator index must lie in 1..{self.n}, got {i}")
        backend = self.backend
        layout = self.layout
        lam_i = self.lam[i - 1]
        out: dict = {}
        for m, coef in vec.items():
            c = self.offset(m)
            for j in range(i, self.n + 1):
                q = backend.q_int(layout.form_m(c, i, j) - lam_i)
                if backend.is_zero(q):
                    continue
                slot = layout.slot(i, j)
                term = coef * q * self.a[slot]
                target = tuple(
                    (x + 1) % self.l if t == slot else x for t, x in enumerate(m)
                )
                vec_accumulate(backend, out, target, term)
        return out

    def act_k(self, i: int, vec: dict, power: int = 1) -> dict:
        """Torus generator of node i (diagonal); power -1 gives the inverse."""
        if not (1 <= i <= self.n):
            raise IndexError(f"generator index must lie in 1..{self.n}, got {i}")
        backend = self.backend
        layout = self.layout
        lam_i = self.lam[i - 1]
        out: dict = {}
        for m, coef in vec.items():
            expo = layout.form_mu(self.offset(m), i) + lam_i
            out[m] = coef * backend.eps_pow(power * expo)
        return out

    def act_k_root(self, coeffs, vec: dict) -> dict:
        """K_mu for mu = sum coeffs[i] * alpha_{i+1}: the multiplicative torus action."""
        if len(coeffs) != self.n:
            raise ValueError(f"root coefficients need length {self.n}")
        backend = self.backend
        layout = self.layout
        out: dict = {}
        for m, coef in vec.items():
            c = self.offset(m)
            expo = 0
            for t, ct in enumerate(coeffs):
                if ct:
                    expo += ct * (layout.form_mu(c, t + 1) + self.lam[t])
            out[m] = coef * backend.eps_pow(expo)
        return out

    def act_k_fw(self, i: int, vec: dict, power: int = 1) -> dict:
        """Extended torus node i: diagonal with exponent -(row tail sum of c) + lambda_{Lambda_i}.

        The weight part is rational in general; on the exact backend it must
        be admissible for eps_pow, else NonInvertibleDenominatorError.
        """
        if not (1 <= i <= self.n):
            raise IndexError(f"generator index must lie in 1..{self.n}, got {i}")
        backend = self.backend
        layout = self.layout
        w = rootdata.lambda_weight(self.n, self.lam, i)
        out: dict = {}
        for m, coef in vec.items():
            expo = -layout.row_tail_sum(self.offset(m), i) + w
            if isinstance(expo, Fraction) and expo.denominator == 1:
                expo = expo.numerator
            out[m] = coef * backend.eps_pow(power * expo)
        return out

    # -- operator closures ---------------------------------------------------

    def e_op(self, i: int):
        return lambda vec: self.act_e(i, vec)

    def f_op(self, i: int):
        return lambda vec: self.act_f(i, vec)

    def k_op(self, i: int, power: int = 1):
        return lambda vec: self.act_k(i, vec, power)

    def finite_generator_map(self) -> dict:
        """Named operators of the finite-type action, inverses included."""
        ops = {}
        for i in range(1, self.n + 1):
            ops[f"e{i}"] = self.e_op(i)
            ops[f"f{i}"] = self.f_op(i)
            ops[f"k{i}"] = self.k_op(i)
            ops[f"k{i}_inv"] = self.k_op(i, -1)
        return ops

    def __repr__(self):
        return (
            f"SchnizerModule(n={self.n}, l={self.l}, lam={self.lam}, "
            f"backend={self.backend.name}, dim={self.dimension})"
        )


def distinguished_module(backend, n: int, lam) -> SchnizerModule:
    """V(a, b, lambda) at the distinguished parameter point a = 1, b = 0."""
    return SchnizerModule(backend, n, lam)
