"""Concurrent game structures, SL_ii and HyperSL: checking and translations."""

from .cgs import Cgs, CgsError, ObservationFamily, cgs_from_json, cgs_to_json, validate_cgs
from .checker import StrategyClass, check_hypersl, check_slii
from .encode_h2s import self_compose, translate_hypersl
from .encode_s2h import build_ii, build_ind, translate_slii
from .ilar import IlArCertificate, is_action_recording, is_injectively_labeled, make_il_ar
from .syntax import FormulaError, negate_state, parse_hypersl, parse_slii, to_text
from .verify import verify_theorem1, verify_theorem2

__all__ = [
    "Cgs", "CgsError", "ObservationFamily", "cgs_from_json", "cgs_to_json", "validate_cgs",
    "StrategyClass", "check_hypersl", "check_slii", "self_compose", "translate_hypersl",
    "build_ii", "build_ind", "translate_slii", "IlArCertificate", "is_action_recording",
    "is_injectively_labeled", "make_il_ar", "FormulaError", "negate_state", "parse_hypersl",
    "parse_slii", "to_text", "verify_theorem1", "verify_theorem2",
]
