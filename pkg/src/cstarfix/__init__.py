"""Computations in C*-algebra valued metric spaces over matrix algebras.

Certificates for contractive conditions, Picard and common-fixed-point
solves with geometric tail bounds, and a gallery of pinned examples.
"""

from .algebra import Algebra, Tolerance
from .certificate import Certificate
from .contraction import (MappingScenario, certify_ciric1, certify_ciric2, certify_common, certify_eq1,
                          certify_kannan, eq1_as_ciric1, kannan_as_ciric2, squared_gauge)
from .errors import (AlgebraError, ContractionError, CStarError, DomainError, ExpressionError, ScenarioError,
                     UnknownEntryError)
from .gallery import list_entries, run_entry
from .scenario import ScenarioFile, ScenarioParseError, parse_scenario, serialize_scenario
from .solver import (IterationTrace, check_orbital_continuity, common_solve, composed_common_solve,
                     picard_solve, uniqueness_probe)
from .space import MetricSpace, PointDomain, check_metric_axioms, probe_continuity, sequence_limit

__version__ = "0.1.0"

__all__ = [
    "Algebra", "AlgebraError", "CStarError", "Certificate", "ContractionError", "DomainError",
    "ExpressionError", "IterationTrace", "MappingScenario", "MetricSpace", "PointDomain", "ScenarioError",
    "ScenarioFile", "ScenarioParseError", "Tolerance", "UnknownEntryError", "certify_ciric1",
    "certify_ciric2", "certify_common", "certify_eq1", "certify_kannan", "check_metric_axioms",
    "check_orbital_continuity", "common_solve", "composed_common_solve", "eq1_as_ciric1",
    "kannan_as_ciric2", "list_entries", "parse_scenario", "picard_solve", "probe_continuity",
    "run_entry", "sequence_limit", "serialize_scenario", "squared_gauge", "uniqueness_probe",
]
