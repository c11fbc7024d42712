"""Exact computations with relative stratified modules over finite fields."""

from .diffop import DigitVector, binom_mod_p, divided_partial, p_adic_digits
from .errors import StratError
from .exponents import LogModule, exponent_digits, log_pole_order, search_log_extension, torsion_class
from .gf import FieldElement, FieldSpec, make_field, prime_field
from .horizon import (
    FamilySpec,
    TrivializationCertificate,
    gauge_degree_profile,
    horizontal_sections,
    make_family,
    explicit_gauge,
    trivialize,
)
from .poly import Poly, PolyRing
from .stratmod import (
    GaugeMatrix,
    StratifiedModule,
    apply_operator,
    direct_sum,
    dual,
    extend_scalars,
    gauge_transform,
    invert_coordinate,
    restrict_fiber,
    tensor,
    verify_relations,
)

__all__ = [name for name in dir() if not name.startswith("_")]
