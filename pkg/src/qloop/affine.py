"""Loop-algebra structure over the triangular-index modules.

The affine generators with index 0 act through evaluation maps.  Two
independently coded routes compute them:

* the bracket route: iterated eps^(-1)-twisted commutator chains of the
  finite generators, composed with a diagonal torus factor and the twisted
  spectral parameter (the defining composition);

* the closed route: explicit sums over descent sequences, each term a
  product of a sign, a parameter character, an eps power whose exponent is
  a linear form in the index entries, and one deformed integer.

Tests require the two routes to agree exactly on every basis vector.  The
bracket route folds the spectral twist and the extended-torus eigenvalues
into a single integer exponent, so it stays well defined even when
gcd(l, n+1) != 1 and the two factors would separately need fractional
eps powers; an unfused "literal" route that keeps the factors separate is
also provided for cross-checks at parameters where it is admissible.

A descent sequence of length i is a tuple r = (r_1, ..., r_i) that weakly
decreases up to a pivot position s and strictly increases after it.  The
lowering family ("f") additionally requires k <= r_k <= n, the raising
family ("e") requires 1 <= r_k <= k.  The pivot is unique per sequence;
enumeration is by brute force over the index ranges with that uniqueness
asserted.

Two typographical defects of the source formulas are resolved here, both
validated by exact agreement with the bracket route (see the tests):
the raising closed form at partial length carries no weight shift in its
deformed integer, and the affine lowering closed form reads its offset at
column n - s + 1.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import NamedTuple

from . import rootdata
from .errors import KindMismatchError, RankTooSmallError
from .schnizer import SchnizerModule, vec_accumulate, vec_scale, vec_sub


def q_bracket(backend, u, v, sign: str | None = "+"):
    """Twisted commutator of operators: u v - eps^(+-1) v u.

    sign "+" twists by eps, "-" by eps^(-1), None gives the plain
    commutator u v - v u.
    """
    if sign is None:
        factor = backend.one
    elif sign == "+":
        factor = backend.eps_pow(1)
    elif sign == "-":
        factor = backend.eps_pow(-1)
    else:
        raise ValueError(f"bracket sign must be '+', '-' or None, got {sign!r}")

    def bracket(vec: dict) -> dict:
        return vec_sub(backend, u(v(vec)), vec_scale(backend, factor, v(u(vec))))

    return bracket


def lowering_chain(module: SchnizerModule, upto: int | None = None, reverse: bool = False):
    """Iterated eps^(-1)-bracket of lowering generators.

    Standard order nests from generator 1 outward: X_1 = F_1,
    X_k = [F_k, X_{k-1}].  Reverse order nests from generator n inward:
    Y_n = F_n, Y_k = [F_k, Y_{k+1}], returning Y_1 (full length only).
    """
    return _chain(module, module.f_op, upto, reverse)


def raising_chain(module: SchnizerModule, upto: int | None = None, reverse: bool = False):
    """Iterated eps^(-1)-bracket of raising generators, same nesting rules."""
    return _chain(module, module.e_op, upto, reverse)


def _chain(module, op_of, upto, reverse):
    backend = module.backend
    if reverse:
        if upto is not None and upto != module.n:
            raise ValueError("reverse chains are only defined at full length")
        op = op_of(module.n)
        for k in range(module.n - 1, 0, -1):
            op = q_bracket(backend, op_of(k), op, "-")
        return op
    if upto is None:
        upto = module.n
    if not (1 <= upto <= module.n):
        raise IndexError(f"chain length must lie in 1..{module.n}, got {upto}")
    op = op_of(1)
    for k in range(2, upto + 1):
        op = q_bracket(backend, op_of(k), op, "-")
    return op


def theta_ops(module: SchnizerModule, i: int):
    """The bracket-route pair (raising chain, lowering chain) of length i."""
    return raising_chain(module, i), lowering_chain(module, i)


class DescentSequence(NamedTuple):
    family: str  # "f" (lowering) or "e" (raising)
    pivot: int
    seq: tuple[int, ...]


@lru_cache(maxsize=None)
def descent_sequences(n: int, i: int, family: str) -> tuple[DescentSequence, ...]:
    """All descent sequences of length i, sorted by (pivot, seq).

    Brute-force enumeration over the family's index ranges; the pivot is
    determined by the shape and asserted unique.
    """
    if family not in ("f", "e"):
        raise ValueError(f"family must be 'f' or 'e', got {family!r}")
    if not (1 <= i <= n):
        raise IndexError(f"sequence length must lie in 1..{n}, got {i}")
    if family == "f":
        ranges = [range(k, n + 1) for k in range(1, i + 1)]
    else:
        ranges = [range(1, k + 1) for k in range(1, i + 1)]
    found = []
    for seq in product(*ranges):
        pivots = [s for s in range(1, i + 1) if _pivot_ok(seq, s)]
        if not pivots:
            continue
        assert len(pivots) == 1, f"descent pivot not unique for {seq}: {pivots}"
        found.append(DescentSequence(family, pivots[0], seq))
    found.sort(key=lambda d: (d.pivot, d.seq))
    return tuple(found)


def _pivot_ok(seq, s):
    for k in range(1, s):
        if seq[k - 1] < seq[k]:
            return False
    for k in range(s, len(seq)):
        if seq[k - 1] >= seq[k]:
            return False
    return True


def descent_shift(layout, d: DescentSequence) -> tuple[int, ...]:
    """Total index shift of a descent walk: the sum of its per-step shifts."""
    total = [0] * layout.size
    if d.family == "f":
        for k, r in enumerate(d.seq, start=1):
            total[layout.slot(k, r)] += 1
    else:
        for k, r in enumerate(d.seq, start=1):
            for t, s in enumerate(layout.raising_shift(k, r)):
                total[t] += s
    return tuple(total)


_FORM_FAMILY = {
    "f_partial": "f",
    "e_partial": "e",
    "f_full": "f",
    "e_full": "e",
    "f_affine": "f",
    "e_affine": "e",
}


def descent_form(layout, kind: str, c, d: DescentSequence):
    """Exponent linear form of a descent sequence, by kind.

    Partial kinds sum the per-step coefficient forms with signs split at
    the pivot; full and affine kinds are the closed full-length variants
    (affine = the ones entering the index-0 actions).  The sequence family
    must match the kind's family.
    """
    family = _FORM_FAMILY.get(kind)
    if family is None:
        raise KindMismatchError(f"unknown form kind {kind!r}")
    if d.family != family:
        raise KindMismatchError(
            f"form {kind!r} needs a {family!r}-family sequence, got {d.family!r}"
        )
    if kind.endswith("_partial"):
        return _descent_form_partial(layout, family, c, d)
    if len(d.seq) != layout.n:
        raise KindMismatchError(f"form {kind!r} needs a full-length sequence")
    if family == "f":
        base = _staircase_sum(layout, c, d)
        if kind == "f_affine":
            return base
        return base - layout.entry(c, layout.n, layout.n) + layout.row_tail_sum(c, 1)
    base = -_raising_tail_sum(layout, c, d)
    s = d.pivot
    n = layout.n
    if kind == "e_affine":
        head = sum(layout.entry(c, 1, k) for k in range(1, n - s + 2))
        return base - layout.entry(c, n, n) + head
    return base - sum(layout.entry(c, 1, k) for k in range(n - s + 2, n + 1))


def _descent_form_partial(layout, family, c, d):
    s = d.pivot
    form = layout.form_m if family == "f" else layout.form_n
    total = 0
    for k in range(1, s):
        total += form(c, k, d.seq[k - 1])
    for k in range(s + 1, len(d.seq) + 1):
        total -= form(c, k, d.seq[k - 1])
    return total


def _staircase_sum(layout, c, d):
    """Pivot entry plus the double sums between consecutive sequence values."""
    s = d.pivot
    r = d.seq
    total = layout.entry(c, s - 1, s - 1)
    for k in range(1, s):
        for p in range(r[k], r[k - 1]):
            total += layout.entry(c, k, p)
    for k in range(1, s + 1):
        upper = layout.n if k == 1 else r[k - 2]
        for p in range(r[k - 1] + 1, upper + 1):
            total -= layout.entry(c, k, p)
    return total


def _raising_tail_sum(layout, c, d):
    s = d.pivot
    r = d.seq
    n = layout.n
    total = 0
    for k in range(s + 1, n + 1):
        rk = r[k - 1]
        col = n - k + rk
        total += layout.entry(c, rk - 1, col) - layout.entry(c, rk, col)
    return total


def theta_closed(module: SchnizerModule, i: int, family: str):
    """Closed-form operator equal to the length-i bracket chain.

    Lowering family: sum over lowering descent sequences with deformed
    integer [M_{s,r_s}(c) - lambda_s]; raising family: sum over raising
    descent sequences with deformed integer [N_{s,1}(c)] (no weight shift).
    """
    backend = module.backend
    layout = module.layout
    seqs = descent_sequences(module.n, i, family)
    lam = module.lam
    shifts = [descent_shift(layout, d) for d in seqs]

    def op(vec: dict) -> dict:
        out: dict = {}
        for m, coef in vec.items():
            c = module.offset(m)
            for d, shift in zip(seqs, shifts):
                s = d.pivot
                if family == "f":
                    q = backend.q_int(layout.form_m(c, s, d.seq[s - 1]) - lam[s - 1])
                    if backend.is_zero(q):
                        continue
                    expo = (
                        descent_form(layout, "f_partial", c, d)
                        - rootdata.lambda_split(lam, s, i)
                        + 1
                        - s
                    )
                else:
                    q = backend.q_int(layout.form_n(c, s, 1))
                    if backend.is_zero(q):
                        continue
                    expo = descent_form(layout, "e_partial", c, d) + 1 - s
                term = coef * q * module.a_char(shift) * backend.eps_pow(expo)
                if (i + s) % 2:
                    term = -term
                target = tuple((x + t) % module.l for x, t in zip(m, shift))
                vec_accumulate(backend, out, target, term)
        return out

    return op


def theta_closed_full(module: SchnizerModule, family: str):
    """Full-length closed form via the staircase/tail exponent forms.

    Mathematically equal to theta_closed(module, n, family) but computed
    from the independently-derived full-length exponent forms, which makes
    it a separate oracle in the agreement tests.
    """
    backend = module.backend
    layout = module.layout
    n = module.n
    seqs = descent_sequences(n, n, family)
    lam = module.lam
    shifts = [descent_shift(layout, d) for d in seqs]

    def op(vec: dict) -> dict:
        out: dict = {}
        for m, coef in vec.items():
            c = module.offset(m)
            for d, shift in zip(seqs, shifts):
                s = d.pivot
                if family == "f":
                    q = backend.q_int(
                        layout.entry(c, s, s) - layout.entry(c, s - 1, s - 1) - lam[s - 1]
                    )
                    if backend.is_zero(q):
                        continue
                    expo = (
                        descent_form(layout, "f_full", c, d)
                        - rootdata.lambda_split(lam, s)
                        + 1
                        - s
                    )
                else:
                    q = backend.q_int(-layout.entry(c, 1, n - s + 1))
                    if backend.is_zero(q):
                        continue
                    expo = descent_form(layout, "e_full", c, d) + 1 - s
                term = coef * q * module.a_char(shift) * backend.eps_pow(expo)
                if (n + s) % 2:
                    term = -term
                target = tuple((x + t) % module.l for x, t in zip(m, shift))
                vec_accumulate(backend, out, target, term)
        return out

    return op


class EvaluationModule:
    """A triangular-index module with the index-0 loop generators attached.

    Parameters: the base module, a nonzero spectral scalar a, and the
    evaluation sign.  Generators with index >= 1 act exactly as in the base
    module; index 0 acts through the evaluation composition, computable by
    the closed, bracket, or literal route.
    """

    def __init__(self, base: SchnizerModule, a, sign: str):
        if base.n < 2:
            raise RankTooSmallError(
                f"evaluation modules need rank n >= 2, got n={base.n}"
            )
        if sign not in ("+", "-"):
            raise ValueError(f"sign must be '+' or '-', got {sign!r}")
        if base.backend.is_zero(a):
            raise ValueError("spectral parameter must be nonzero")
        self.base = base
        self.backend = base.backend
        self.n = base.n
        self.l = base.l
        self.a = a
        self.sign = sign
        self._sgn = 1 if sign == "+" else -1

    # -- index-0 actions, closed route -------------------------------------

    def e0_closed(self):
        backend = self.backend
        module = self.base
        layout = module.layout
        n = self.n
        lam = module.lam
        sgn = self._sgn
        seqs = descent_sequences(n, n, "f")
        shifts = [descent_shift(layout, d) for d in seqs]
        a = self.a

        def op(vec: dict) -> dict:
            out: dict = {}
            for m, coef in vec.items():
                c = module.offset(m)
                for d, shift in zip(seqs, shifts):
                    s = d.pivot
                    q = backend.q_int(
                        layout.entry(c, s, s)
                        - layout.entry(c, s - 1, s - 1)
                        - lam[s - 1]
                    )
                    if backend.is_zero(q):
                        continue
                    expo = (
                        sgn
                        * (
                            descent_form(layout, "f_affine", c, d)
                            - rootdata.lambda_split(lam, s)
                            - s
                        )
                        + n
                    )
                    term = coef * a * q * module.a_char(shift) * backend.eps_pow(expo)
                    if (n + s) % 2:
                        term = -term
                    target = tuple((x + t) % module.l for x, t in zip(m, shift))
                    vec_accumulate(backend, out, target, term)
            return out

        return op

    def f0_closed(self):
        backend = self.backend
        module = self.base
        layout = module.layout
        n = self.n
        sgn = self._sgn
        seqs = descent_sequences(n, n, "e")
        shifts = [descent_shift(layout, d) for d in seqs]
        a_inv = self.backend.inv(self.a)

        def op(vec: dict) -> dict:
            out: dict = {}
            for m, coef in vec.items():
                c = module.offset(m)
                for d, shift in zip(seqs, shifts):
                    s = d.pivot
                    q = backend.q_int(-layout.entry(c, 1, n - s + 1))
                    if backend.is_zero(q):
                        continue
                    expo = (
                        sgn * (descent_form(layout, "e_affine", c, d) - s + n + 1) - n
                    )
                    term = coef * a_inv * q * module.a_char(shift) * backend.eps_pow(expo)
                    if (s - 1) % 2:
                        term = -term
                    target = tuple((x + t) % module.l for x, t in zip(m, shift))
                    vec_accumulate(backend, out, target, term)
            return out

        return op

    # -- index-0 actions, bracket route -------------------------------------

    def e0_bracket(self):
        """Chain composition with the spectral twist and torus factors fused.

        Fusing cancels the rational weight exponents of the twist against
        those of the extended torus, leaving integer exponents only.
        """
        module = self.base
        if self.sign == "+":
            chain = lowering_chain(module)
            prefactor = self.a * self.backend.eps_pow(self.n - 1)
            tail_sign = -1
        else:
            chain = lowering_chain(module, reverse=True)
            prefactor = self.a * self.backend.eps_pow(2 * self.n)
            if self.n % 2 == 0:
                prefactor = -prefactor
            tail_sign = 1
        return self._fused(chain, prefactor, tail_sign)

    def f0_bracket(self):
        module = self.base
        a_inv = self.backend.inv(self.a)
        if self.sign == "+":
            chain = raising_chain(module)
            prefactor = a_inv
            if self.n % 2 == 0:
                prefactor = -prefactor
            tail_sign = 1
        else:
            chain = raising_chain(module, reverse=True)
            prefactor = a_inv * self.backend.eps_pow(-self.n - 1)
            tail_sign = -1
        return self._fused(chain, prefactor, tail_sign)

    def _fused(self, chain, prefactor, tail_sign: int):
        backend = self.backend
        module = self.base
        layout = module.layout
        n = self.n

        def op(vec: dict) -> dict:
            mid = chain(vec)
            out: dict = {}
            for m, coef in mid.items():
                c = module.offset(m)
                expo = tail_sign * (
                    layout.row_tail_sum(c, 1) - layout.entry(c, n, n)
                )
                out[m] = coef * prefactor * backend.eps_pow(expo)
            return out

        return op

    # -- index-0 actions, literal route --------------------------------------

    def e0_literal(self):
        """Unfused composition: eps^(-1) * twisted parameter * torus pair * chain.

        Needs the extended-torus exponents to be admissible; raises
        NonInvertibleDenominatorError through eps_pow otherwise.
        """
        module = self.base
        backend = self.backend
        a_tw = rootdata.eval_parameter(backend, self.n, module.lam, self.a, self.sign)
        scalar = backend.eps_pow(-1) * a_tw
        if self.sign == "+":
            chain = lowering_chain(module)
            p1, pn = 1, -1
        else:
            chain = lowering_chain(module, reverse=True)
            p1, pn = -1, 1

        def op(vec: dict) -> dict:
            w = module.act_k_fw(1, module.act_k_fw(self.n, chain(vec), pn), p1)
            return vec_scale(backend, scalar, w)

        return op

    def f0_literal(self):
        module = self.base
        backend = self.backend
        a_tw = rootdata.eval_parameter(backend, self.n, module.lam, self.a, self.sign)
        scalar = backend.eps_pow(self.n) * backend.inv(a_tw)
        if self.n % 2 == 0:
            scalar = -scalar
        if self.sign == "+":
            chain = raising_chain(module)
            p1, pn = -1, 1
        else:
            chain = raising_chain(module, reverse=True)
            p1, pn = 1, -1

        def op(vec: dict) -> dict:
            w = module.act_k_fw(1, module.act_k_fw(self.n, chain(vec), pn), p1)
            return vec_scale(backend, scalar, w)

        return op

    # -- torus closure ---------------------------------------------------------

    def k0_op(self, power: int = 1):
        """Index-0 torus action: inverse of the product of all finite nodes."""
        module = self.base
        backend = self.backend
        layout = module.layout
        lam = module.lam

        def op(vec: dict) -> dict:
            out: dict = {}
            for m, coef in vec.items():
                c = module.offset(m)
                expo = 0
                for i in range(1, module.n + 1):
                    expo += layout.form_mu(c, i) + lam[i - 1]
                out[m] = coef * backend.eps_pow(-power * expo)
            return out

        return op

    # -- generator dispatch ------------------------------------------------------

    def generator(self, name: str, route: str = "closed"):
        """Operator for an affine generator label: e0..en, f0..fn, k0..kn, k*_inv."""
        inverse = name.endswith("_inv")
        stem = name[:-4] if inverse else name
        kind, idx = stem[0], stem[1:]
        if kind not in ("e", "f", "k") or not idx.isdigit():
            raise ValueError(f"unknown generator label {name!r}")
        i = int(idx)
        if not (0 <= i <= self.n):
            raise IndexError(f"generator index must lie in 0..{self.n}, got {i}")
        if inverse and kind != "k":
            raise ValueError(f"only torus generators have inverses, got {name!r}")
        power = -1 if inverse else 1
        if kind == "k":
            return self.k0_op(power) if i == 0 else self.base.k_op(i, power)
        if i > 0:
            return self.base.e_op(i) if kind == "e" else self.base.f_op(i)
        table = {
            ("e", "closed"): self.e0_closed,
            ("e", "bracket"): self.e0_bracket,
            ("e", "literal"): self.e0_literal,
            ("f", "closed"): self.f0_closed,
            ("f", "bracket"): self.f0_bracket,
            ("f", "literal"): self.f0_literal,
        }
        maker = table.get((kind, route))
        if maker is None:
            raise ValueError(f"unknown route {route!r}")
        return maker()

    def affine_generator_map(self, route: str = "closed") -> dict:
        """Named operators for all affine generators, torus inverses included."""
        ops = {}
        for i in range(0, self.n + 1):
            ops[f"e{i}"] = self.generator(f"e{i}", route)
            ops[f"f{i}"] = self.generator(f"f{i}", route)
            ops[f"k{i}"] = self.generator(f"k{i}")
            ops[f"k{i}_inv"] = self.generator(f"k{i}_inv")
        return ops

    def __repr__(self):
        return (
            f"EvaluationModule(n={self.n}, l={self.l}, lam={self.base.lam}, "
            f"sign={self.sign!r}, backend={self.backend.name})"
        )
