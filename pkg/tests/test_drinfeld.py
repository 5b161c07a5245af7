"""Spectral polynomials and the twist-matching decision in its three forms."""

from itertools import product

import pytest

from qloop.affine import EvaluationModule
from qloop.drinfeld import (
    DrinfeldPolynomial,
    IsoDecision,
    drinfeld_closed,
    drinfeld_from_module,
    iso_direct,
    iso_explicit,
    iso_witness,
    psi1_coefficient,
    spectral_point,
)
from qloop.errors import NotHighestWeightError
from qloop.rootdata import lambda_split
from qloop.scalars import make_backend
from qloop.schnizer import SchnizerModule

BK3 = make_backend("exact", 3)
BK5 = make_backend("exact", 5)


def test_polynomial_basics():
    p = DrinfeldPolynomial.one(BK3)
    assert p.degree == 0
    assert BK3.eq(p(BK3.eps), BK3.one)
    q = DrinfeldPolynomial.from_roots(BK3, [BK3.eps, BK3.one])
    assert q.degree == 2
    assert BK3.is_zero(q(BK3.eps))
    assert BK3.is_zero(q(BK3.one))
    assert not BK3.is_zero(q(BK3.eps_pow(2)))
    with pytest.raises(ValueError):
        DrinfeldPolynomial(BK3, [BK3.one, BK3.eps])  # not monic


def test_polynomial_serialize_shape():
    q = DrinfeldPolynomial.from_roots(BK5, [BK5.eps])
    d = q.serialize()
    assert d["degree"] == 1
    assert len(d["coefficients"]) == 2


def test_rank1_l5_frozen_example():
    # one-node case, l = 5, weight 2, unit twist, plus sign:
    # P(t) = (t - eps^2)(t - 1)
    bk = BK5
    p = drinfeld_closed(bk, 1, (2,), bk.one, "+", 1)
    want = DrinfeldPolynomial.from_roots(bk, [bk.eps_pow(2), bk.one])
    assert p.eq(want)


def test_zero_weight_component_is_constant():
    p = drinfeld_closed(BK3, 2, (0, 2), BK3.eps, "+", 1)
    assert p.degree == 0
    mod = SchnizerModule(BK3, 2, (0, 2))
    ev = EvaluationModule(mod, BK3.eps, "+")
    q = drinfeld_from_module(ev, 1)
    assert q.degree == 0
    assert BK3.is_zero(psi1_coefficient(ev, 1))


def test_spectral_point_center():
    # the closed-form roots sit on a geometric ladder centered at
    # a^(-1) eps^(sign (lam^(i) + i))
    for sign, sgn in (("+", 1), ("-", -1)):
        for lam in [(1, 1), (2, 1)]:
            for i in (1, 2):
                a = BK3.eps
                c = spectral_point(BK3, 2, lam, a, sign, i)
                want = BK3.inv(a) * BK3.eps_pow(sgn * (lambda_split(lam, i) + i))
                assert BK3.eq(c, want)
                if lam[i - 1] == 0:
                    continue
                p = drinfeld_closed(BK3, 2, lam, a, sign, i)
                roots_prod = p(BK3.zero) * (
                    -BK3.one if p.degree % 2 else BK3.one
                )
                ladder = BK3.one
                for step in range(1, lam[i - 1] + 1):
                    ladder = ladder * BK3.eps_pow(lam[i - 1] - 2 * step + 1) * c
                assert BK3.eq(roots_prod, ladder)


def test_psi1_frozen_rank2():
    mod = SchnizerModule(BK3, 2, (1, 1))
    ev = EvaluationModule(mod, BK3.one, "+")
    got = psi1_coefficient(ev, 1)
    # plus-case closed form: a eps^(lam_i - lam^(i) - i - 1) (eps^lam_i - eps^-lam_i)
    lam = (1, 1)
    want = BK3.eps_pow(lam[0] - lambda_split(lam, 1) - 1 - 1) * (
        BK3.eps - BK3.inv(BK3.eps)
    )
    assert BK3.eq(got, want)


def test_psi1_plus_closed_form_grid():
    for lam in product(range(3), repeat=2):
        mod = SchnizerModule(BK3, 2, lam)
        for a in (BK3.one, BK3.eps):
            ev = EvaluationModule(mod, a, "+")
            for i in (1, 2):
                got = psi1_coefficient(ev, i)
                li = lam[i - 1]
                want = a * BK3.eps_pow(li - lambda_split(lam, i) - i - 1) * (
                    BK3.eps_pow(li) - BK3.eps_pow(-li)
                )
                assert BK3.eq(got, want), (lam, i)


def test_module_matches_closed_form():
    for lam in [(1, 1), (2, 0), (1, 2)]:
        mod = SchnizerModule(BK3, 2, lam)
        for sign in "+-":
            for a in (BK3.one, BK3.eps):
                ev = EvaluationModule(mod, a, sign)
                for i in (1, 2):
                    p = drinfeld_from_module(ev, i)
                    q = drinfeld_closed(BK3, 2, lam, a, sign, i)
                    assert p.eq(q), (lam, sign, i)


def test_nonzero_offset_breaks_highest_weight():
    mod = SchnizerModule(BK3, 2, (1, 1), b=(1, 0, 0))
    ev = EvaluationModule(mod, BK3.one, "+")
    with pytest.raises(NotHighestWeightError):
        drinfeld_from_module(ev, 1)


def test_iso_direct_frozen():
    lam = (1, 1)
    d = iso_direct(BK3, 2, lam, BK3.one, BK3.one)
    assert d.verdict is True
    assert d.details["exponents_mod_l"] == {1: 0, 2: 0}
    d2 = iso_direct(BK3, 2, lam, BK3.eps, BK3.one)
    assert d2.verdict is False
    assert d2.details["failing_indices"] == [1, 2]


def test_iso_zero_weight_always_true():
    d = iso_direct(BK3, 2, (0, 0), BK3.eps, BK3.one)
    assert d.verdict is True
    e = iso_explicit(BK3, 2, (0, 0), BK3.eps, BK3.one)
    assert e.verdict is True


def test_iso_explicit_matches_direct_grid():
    for lam in product(range(3), repeat=2):
        for j in range(3):
            a_plus = BK3.eps_pow(j)
            d = iso_direct(BK3, 2, lam, a_plus, BK3.one)
            e = iso_explicit(BK3, 2, lam, a_plus, BK3.one)
            assert d.verdict == e.verdict, (lam, j)


def test_iso_explicit_details_shape():
    e = iso_explicit(BK3, 2, (1, 1), BK3.one, BK3.one)
    assert e.method == "explicit"
    assert "congruences" in e.details
    assert "parameter_exponent_mod_l" in e.details
    assert e.details["parameter_condition"] is True


def test_iso_witness_frozen_cases():
    d = iso_witness(BK3, 2, (1, 1), BK3.one, BK3.one)
    assert d.verdict is True
    assert d.details["closure_dim"] == 7
    assert d.details["differing_generators"] == []

    bad = iso_witness(BK3, 2, (1, 1), BK3.eps, BK3.one)
    assert bad.verdict is False
    assert set(bad.details["differing_generators"]) <= {"e0", "f0", "k0", "k0_inv"}
    assert bad.details["differing_generators"]


def test_iso_witness_zero_weight():
    d = iso_witness(BK3, 2, (0, 0), BK3.eps_pow(2), BK3.one)
    assert d.verdict is True
    assert d.details["closure_dim"] == 1


def test_decision_to_dict():
    d = IsoDecision(True, "direct", {"x": 1})
    out = d.to_dict()
    assert out == {"verdict": True, "method": "direct", "details": {"x": 1}}


def test_nonpower_ratio_fails_both_routes():
    # a ratio outside the root-of-unity ladder falsifies the parameter
    # condition in both decision procedures
    a_plus = BK3.from_int(2)
    d = iso_direct(BK3, 2, (1, 1), a_plus, BK3.one)
    e = iso_explicit(BK3, 2, (1, 1), a_plus, BK3.one)
    assert d.verdict is False and e.verdict is False
