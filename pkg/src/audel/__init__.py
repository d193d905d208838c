"""Dynamic epistemic logic with agent addition and deletion."""

from .frames import AgentUpdateFrame, add_set, del_set, load_frame, observers
from .model import KripkeModel, load_model, validate
from .reduction import reduce_to_el
from .satsolver import brute_force_sat, sat_del, sat_k4
from .semantics import EvalContext, model_check
from .syntax import parse_formula, print_formula
from .update import iterate_updates, product_update, sum_product_update

__version__ = "0.1.0"

__all__ = [
    "AgentUpdateFrame", "EvalContext", "KripkeModel", "add_set", "brute_force_sat",
    "del_set", "iterate_updates", "load_frame", "load_model", "model_check", "observers",
    "parse_formula", "print_formula", "product_update", "reduce_to_el", "sat_del",
    "sat_k4", "sum_product_update", "validate",
]
