"""Exception hierarchy shared by every module of the package.

Each class corresponds to one named failure condition; the CLI turns any of
them into a failed case record instead of a crash.
"""


class GarnierLabError(Exception):
    """Base class for all domain errors raised by garnierlab."""


# numerics
class SingularApproach(GarnierLabError):
    pass


class EvaluationFailure(GarnierLabError):
    pass


class DegenerateInput(GarnierLabError):
    pass


class StencilCollision(GarnierLabError):
    pass


# Fuchsian systems
class PoleEvaluation(GarnierLabError):
    pass


class DegenerateSpectrum(GarnierLabError):
    pass


class InvalidPoleConfig(GarnierLabError):
    pass


# Darboux coordinates and the Garnier flow
class CriticalLocus(GarnierLabError):
    """Two of the q-coordinates collide: the polar locus of the Garnier fields."""


class LambdaDegenerate(GarnierLabError):
    pass


class CubicDegenerate(GarnierLabError):
    pass


class IndeterminateP(GarnierLabError):
    pass


class PolarLocus(GarnierLabError):
    pass


class SpecialSubset(GarnierLabError):
    """The point lies on {Q0 * Q1 * Qinf = 0}, outside the Darboux chart of Sigma."""


class NotInSigma(GarnierLabError):
    pass


class LeftParameterSpace(GarnierLabError):
    pass


class PoleOfFormula(GarnierLabError):
    pass


# monodromy
class PathPlanningFailure(GarnierLabError):
    pass


class OddWord(GarnierLabError):
    pass


class CentralRepresentation(GarnierLabError):
    pass


class BranchApproach(GarnierLabError):
    pass


class ReducibleDeterminant(GarnierLabError):
    pass


# genus-2 systems
class RootAtInfinity(GarnierLabError):
    pass


class ExceptionalDecomposition(GarnierLabError):
    pass


class InvariantHorizontal(GarnierLabError):
    pass


class DegreeCollapse(GarnierLabError):
    pass


class ConfigError(GarnierLabError, ValueError):
    pass
