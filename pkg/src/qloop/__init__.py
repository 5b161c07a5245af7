"""Exact root-of-unity representation toolkit: triangular-index modules,
affine evaluation actions, relation verification, and isomorphism tests."""

from .scalars import CycScalar, ExactBackend, FloatBackend, make_backend
from .rootdata import cartan_affine, cartan_finite, eval_parameter, weight_pairing
from .schnizer import SchnizerModule, distinguished_module
from .affine import EvaluationModule
from .analysis import (
    OperatorMatrix,
    SubmoduleBasis,
    check_nilpotent_type1,
    joint_kernel,
    materialize,
    primitive_vectors,
    span_closure,
    verify_relations,
)

__version__ = "0.1.0"

from .drinfeld import (
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
