"""Highest-weight classification data and the evaluation isomorphism test.

The classifying polynomial of an evaluation module factors into a geometric
string of roots around a single spectral point; that point can be written in
closed form from the weight and spectral parameter, or extracted from the
module itself through the degree-one loop coefficient acting on the highest
weight vector.  Both routes are implemented and must agree exactly.

The isomorphism question for the plus and minus evaluation structures on the
same weight is decided three independent ways: the per-index exponent
condition, the explicit congruence form of that condition, and a direct
operator comparison on the nilpotent closure of the highest weight vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import rootdata
from .analysis import materialize, span_closure
from .affine import EvaluationModule
from .errors import NotHighestWeightError
from .schnizer import SchnizerModule


class DrinfeldPolynomial:
    """Monic polynomial over the backend field, coefficients ascending in t."""

    def __init__(self, backend, coefficients):
        self.backend = backend
        coeffs = list(coefficients)
        if not coeffs:
            raise ValueError("a polynomial needs at least the constant coefficient")
        if not backend.eq(coeffs[-1], backend.one):
            raise ValueError("leading coefficient must be one")
        self.coefficients = coeffs

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def one(cls, backend) -> "DrinfeldPolynomial":
        return cls(backend, [backend.one])

    @classmethod
    def from_roots(cls, backend, roots) -> "DrinfeldPolynomial":
        coeffs = [backend.one]
        for root in roots:
            coeffs = [backend.zero] + coeffs
            for k in range(len(coeffs) - 1):
                coeffs[k] = coeffs[k] - root * coeffs[k + 1]
        return cls(backend, coeffs)

    def __call__(self, t):
        acc = self.backend.zero
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def eq(self, other: "DrinfeldPolynomial") -> bool:
        if self.degree != other.degree:
            return False
        return all(
            self.backend.eq(a, b)
            for a, b in zip(self.coefficients, other.coefficients)
        )

    def serialize(self) -> dict:
        return {
            "degree": self.degree,
            "coefficients": [self.backend.serialize(c) for c in self.coefficients],
        }

    def __repr__(self):
        return f"DrinfeldPolynomial(degree={self.degree})"


def spectral_point(backend, n: int, lam, a, sign: str, i: int):
    """The root-string center a^{-1} eps^{+-(lam^(i) + i)} for direction i."""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    exponent = rootdata.lambda_split(lam, i) + i
    if sign == "-":
        exponent = -exponent
    return backend.inv(a) * backend.eps_pow(exponent)


def drinfeld_closed(backend, n: int, lam, a, sign: str, i: int) -> DrinfeldPolynomial:
    """Closed-form classifying polynomial for direction i.

    Degree lam_i, roots eps^(lam_i - 2p + 1) * spectral_point for
    p = 1..lam_i; weight zero in direction i gives the constant 1.
    """
    weight = lam[i - 1]
    if weight == 0:
        return DrinfeldPolynomial.one(backend)
    center = spectral_point(backend, n, lam, a, sign, i)
    roots = [
        backend.eps_pow(weight - 2 * p + 1) * center for p in range(1, weight + 1)
    ]
    return DrinfeldPolynomial.from_roots(backend, roots)


def _highest_weight_coefficient(ev: EvaluationModule, i: int):
    """Coefficient of v(0) after the raising word e_i..e_1 e_(i+1)..e_n e_0."""
    base = ev.base
    backend = base.backend
    top = base.zero_index()
    vec = ev.e0_closed()(base.basis_vector(top))
    for j in range(base.n, i, -1):
        vec = base.act_e(j, vec)
    for j in range(1, i + 1):
        vec = base.act_e(j, vec)
    coef = backend.zero
    for idx, value in vec.items():
        if idx == top:
            coef = value
        elif not backend.is_zero(value):
            raise NotHighestWeightError(
                f"raising word for direction {i} leaves the highest weight line "
                f"(component at {idx})"
            )
    return coef


def psi1_coefficient(ev: EvaluationModule, i: int):
    """Degree-one loop coefficient acting on the highest weight vector.

    Scales the raising-word image of v(0) by the bracket-expansion factor
    (-1)^(i+1) eps^(lam_i - n - 1) (eps - eps^(-1)).
    """
    base = ev.base
    backend = base.backend
    coef = _highest_weight_coefficient(ev, i)
    sign = backend.one if (i + 1) % 2 == 0 else -backend.one
    factor = (
        sign
        * backend.eps_pow(base.lam[i - 1] - base.n - 1)
        * (backend.eps - backend.eps_pow(-1))
    )
    return factor * coef


def drinfeld_from_module(ev: EvaluationModule, i: int) -> DrinfeldPolynomial:
    """Classifying polynomial extracted from the module action.

    Solves psi_1 = (eps^lam_i - eps^(-lam_i)) * center^(-1) * eps^(lam_i - 1)
    for the root-string center, then assembles the same product as the
    closed form.  Weight zero in direction i gives the constant 1.
    """
    base = ev.base
    backend = base.backend
    weight = base.lam[i - 1]
    if weight == 0:
        return DrinfeldPolynomial.one(backend)
    psi1 = psi1_coefficient(ev, i)
    numerator = (backend.eps_pow(weight) - backend.eps_pow(-weight)) * backend.eps_pow(
        weight - 1
    )
    center = numerator * backend.inv(psi1)
    roots = [
        backend.eps_pow(weight - 2 * p + 1) * center for p in range(1, weight + 1)
    ]
    return DrinfeldPolynomial.from_roots(backend, roots)


# -- isomorphism decision ------------------------------------------------------


@dataclass
class IsoDecision:
    verdict: bool
    method: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "method": self.method, "details": self.details}


def iso_direct(backend, n: int, lam, a_plus, a_minus) -> IsoDecision:
    """Per-index exponent condition: a_+ = a_- eps^(2(lam^(i) + i)) on supp."""
    support = rootdata.support(lam)
    if not support:
        return IsoDecision(True, "direct", {"reason": "zero weight"})
    exponents = {}
    failures = []
    for i in support:
        exponent = 2 * (rootdata.lambda_split(lam, i) + i)
        exponents[i] = exponent % backend.l
        if not backend.eq(a_plus, a_minus * backend.eps_pow(exponent)):
            failures.append(i)
    details = {"exponents_mod_l": exponents, "failing_indices": failures}
    return IsoDecision(not failures, "direct", details)


def iso_explicit(backend, n: int, lam, a_plus, a_minus) -> IsoDecision:
    """Congruence form of the exponent condition over the ordered support.

    Condition (a) constrains the weights along the support by an alternating
    congruence; condition (b) ties a_+/a_- to a single exponent split by the
    parity of the support size.
    """
    support = rootdata.support(lam)
    if not support:
        return IsoDecision(True, "explicit", {"reason": "zero weight"})
    l = backend.l
    m = len(support)
    congruences = []
    ok_a = True
    for r in range(2, m + 1):
        i_r = support[r - 1]
        i_1 = support[0]
        rhs = (-1) ** (r - 1) * lam[i_1 - 1] + (-1) ** r * i_1 - i_r
        rhs += 2 * sum(
            (-1) ** (r - 1 + k) * support[k - 1] for k in range(2, r)
        )
        rhs %= l
        holds = lam[i_r - 1] % l == rhs and rhs != 0
        congruences.append({"r": r, "index": i_r, "required_mod_l": rhs, "holds": holds})
        ok_a = ok_a and holds
    if m % 2 == 1:
        exponent = 2 * sum((-1) ** (k - 1) * support[k - 1] for k in range(1, m + 1))
    else:
        exponent = 2 * (
            lam[support[0] - 1]
            + sum((-1) ** k * support[k - 1] for k in range(2, m + 1))
        )
    ok_b = bool(backend.eq(a_plus, a_minus * backend.eps_pow(exponent)))
    details = {
        "congruences": congruences,
        "parameter_exponent_mod_l": exponent % l,
        "parameter_condition": ok_b,
    }
    return IsoDecision(ok_a and ok_b, "explicit", details)


def iso_witness(backend, n: int, lam, a_plus, a_minus) -> IsoDecision:
    """Operator comparison on the nilpotent closure of the highest weight line.

    The closure of v(0) under the finite generators is invariant under both
    affine structures (the extended torus normalizes the finite part and
    fixes the v(0) line projectively), so both generator families restrict
    to the same space; the verdict is exact equality of every restricted
    generator matrix.
    """
    base = SchnizerModule(backend, n, lam)
    generators = list(base.finite_generator_map().values())
    start = base.basis_vector(base.zero_index())
    closure = span_closure(backend, [start], generators, base.dimension)
    plus = EvaluationModule(base, a_plus, "+")
    minus = EvaluationModule(base, a_minus, "-")
    plus_ops = plus.affine_generator_map()
    minus_ops = minus.affine_generator_map()
    mismatches = []
    for name in sorted(plus_ops):
        m_plus = materialize(plus_ops[name], base, restriction=closure)
        m_minus = materialize(minus_ops[name], base, restriction=closure)
        if not m_plus.eq(m_minus, backend):
            mismatches.append(name)
    details = {"closure_dim": closure.dim, "differing_generators": mismatches}
    if not backend.is_exact:
        details["tolerance"] = backend.tolerance
    return IsoDecision(not mismatches, "operator-witness", details)
