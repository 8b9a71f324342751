# Nothing in this file should depend on anything except for stdlib enum.
# This is to prevent circular dependencies for low-level components.

from enum import Enum


class TailClass(Enum):
    """
    Which asymptotic regime a step law belongs to. The regime decides
    which growth rate -log P{N(t)=k} has, and hence which prediction a
    study compares against.
    """

    light = "light"
    regular_finite_mean = "regular-finite-mean"
    regular_infinite_mean = "regular-infinite-mean"
    semi_exponential = "semi-exponential"


class MarginalsMethod(Enum):
    exact_gamma = "exact-gamma"
    lattice = "lattice"


class StudyName(Enum):
    rates = "rates"
    exact_prob = "exact-prob"
    convergence_t21 = "convergence-t21"
    convergence_t22 = "convergence-t22"
    convergence_t23 = "convergence-t23"
    light_expansion_t24 = "light-expansion-t24"
    light_expansion_t25 = "light-expansion-t25"
    forrester = "forrester"
    local_clt = "local-clt"
    variance_asymptotics = "variance-asymptotics"
    is_compare = "is-compare"
    ginibre_radii = "ginibre-radii"
    zero_count_limit = "zero-count-limit"


class ExitStatus(Enum):
    ok = 0
    configuration_error = 1
    numerical_failure = 2
