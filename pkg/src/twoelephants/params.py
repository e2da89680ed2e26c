"""Reinforcement parameters and first steps of the coupled pair."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class ReinforcementParams:
    """Memory parameters of the two walkers.

    The centered parameters alpha_i = 2*p_i - 1 are stored as primary and
    the repeat probabilities p_i are derived as (1 + alpha_i)/2, so
    constructing from alphas round-trips exactly; ``from_p`` computes
    alpha = 2p - 1 once, in double precision.
    """

    alpha1: float
    alpha2: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2"):
            a = getattr(self, name)
            if not -1.0 <= a <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1]: got {a}")

    @classmethod
    def from_p(cls, p1, p2):
        for name, p in (("p1", p1), ("p2", p2)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]: got {p}")
        return cls(2.0 * p1 - 1.0, 2.0 * p2 - 1.0)

    @property
    def p1(self):
        return 0.5 * (1.0 + self.alpha1)

    @property
    def p2(self):
        return 0.5 * (1.0 + self.alpha2)

    def alpha_product_exact(self):
        """alpha1 * alpha2 in exact rational arithmetic.

        Floats are dyadic rationals, so the product is exact; regime
        boundaries (e.g. alpha1*alpha2 == 1/4) can be decided without
        floating-point tolerance whenever the inputs are exact.
        """
        return Fraction(self.alpha1) * Fraction(self.alpha2)


@dataclass(frozen=True)
class InitialCondition:
    """First steps X_1 of the two walkers, each +1 or -1."""

    x1_first: int = 1
    x1_second: int = 1

    def __post_init__(self):
        for name in ("x1_first", "x1_second"):
            if getattr(self, name) not in (-1, 1):
                raise ValueError(f"{name} must be +1 or -1: got {getattr(self, name)}")


DEFAULT_INIT = InitialCondition()


def check_nontrivial_init(params, init):
    """Reject the locked start states of the fully reinforced cases.

    At alpha1 = alpha2 = 1, equal first steps freeze both walkers into
    S_n = n * x1 forever; at alpha1 = alpha2 = -1, opposite first steps
    freeze the alternating pattern. The limit laws for these parameter
    corners assume the non-degenerate start. Plain simulation accepts any
    start; callers that rely on the limit laws call this first.
    """
    if params.alpha1 == 1.0 and params.alpha2 == 1.0 and init.x1_first == init.x1_second:
        raise ValueError(
            "alpha1 = alpha2 = 1 requires opposite first steps (x1_first != x1_second)"
        )
    if params.alpha1 == -1.0 and params.alpha2 == -1.0 and init.x1_first != init.x1_second:
        raise ValueError(
            "alpha1 = alpha2 = -1 requires equal first steps (x1_first == x1_second)"
        )
