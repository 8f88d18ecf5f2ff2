"""Exact desk-scale construction of circle-valued homomorphisms via rational stacks."""

from .circle import FULL, Arc, ArcFunction, int_scale, lin_comb, minkowski
from .equations import ArcEquation, check_solution
from .errors import (ArcStackError, DependenceDetected, HorizonExhausted, InternalAssertion,
                     LevelFailed, ScenarioInvalid, StageFailed)
from .numbers import QuadNum
from .oracle import FilterOracle
from .vectors import ConstPath, FinSuppVec, InjPath, Law, SeqSpec

__version__ = "0.1.0"
