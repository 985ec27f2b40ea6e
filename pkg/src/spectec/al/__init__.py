"""Algorithmic language: animation of IL rules into step-by-step algorithms."""

from .ast import AlAlgorithm
from .animate import AnimationError, CyclicDependency, animate, animate_rule_group, premise_dataflow
from .dump import dump_algorithm, dump_algorithms

__all__ = ["AlAlgorithm", "AnimationError", "CyclicDependency", "animate", "animate_rule_group",
           "premise_dataflow", "dump_algorithm", "dump_algorithms"]
