"""Executable engine for numerical abstract persuasion argumentation."""

from importlib import resources

from .constraints import interpret_constraints, interpret_term, sat
from .core import (
    EPS,
    ArgKind,
    ArgRef,
    Comparison,
    Framework,
    FrameworkError,
    Literal,
    QuantityMap,
    Semantics,
    State,
    Triple,
    TripleRef,
    classify_argument,
    initial_state,
    validate_framework,
)
from .dsl import ParseError, parse, parse_file, serialize
from .dynamics import (
    adjusted_attacks,
    adjusted_persuasions,
    apply,
    enumerate_persuasion_sets,
    is_valid_persuasion_set,
    lambda_base,
    possible_persuasions,
    successors,
)
from .semantics import agent_extensions, dung_extensions, multi_agent_union_sets

__all__ = [
    "ArgKind",
    "ArgRef",
    "Comparison",
    "EPS",
    "Framework",
    "FrameworkError",
    "Literal",
    "ParseError",
    "QuantityMap",
    "Semantics",
    "State",
    "Triple",
    "TripleRef",
    "adjusted_attacks",
    "adjusted_persuasions",
    "agent_extensions",
    "apply",
    "classify_argument",
    "dung_extensions",
    "enumerate_persuasion_sets",
    "fixture_path",
    "initial_state",
    "interpret_constraints",
    "interpret_term",
    "is_valid_persuasion_set",
    "lambda_base",
    "load_fixture",
    "multi_agent_union_sets",
    "parse",
    "parse_file",
    "possible_persuasions",
    "sat",
    "serialize",
    "successors",
    "validate_framework",
]

__version__ = "0.1.0"


def fixture_path(name: str = "negotiation.napa"):
    """Path of a bundled scenario file."""
    return resources.files(__name__).joinpath("fixtures", name)


def load_fixture(name: str = "negotiation.napa") -> Framework:
    return parse(fixture_path(name).read_bytes())
