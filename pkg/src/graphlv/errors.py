"""Error taxonomy for graph construction, numerics, and the CLI.

Three families matter downstream: configuration/input errors (CLI exit
code 2), numerical failures (exit code 3), and reproduction mismatches
(exit code 4). Everything derives from GraphLVError so callers can catch
the whole library surface at once.
"""


class GraphLVError(Exception):
    """Base class for all library errors."""


class InputError(GraphLVError):
    """Invalid graph, partition, field, or configuration data."""


class NumericalError(GraphLVError):
    """A solver or integrator failed to produce a trustworthy result."""


# -- graph construction / partition ----------------------------------------

class SelfLoop(InputError):
    pass


class AsymmetricWeight(InputError):
    pass


class MismatchedTopology(InputError):
    """The two edge-weight tables induce different edge sets."""


class NonpositiveMeasure(InputError):
    pass


class NotConnected(InputError):
    pass


class InteriorNotSubset(InputError):
    """Interior must be a nonempty strict subset of the vertex set."""


class EmptyBoundary(InputError):
    pass


class MissingVertexValue(InputError):
    pass


class NotBoundaryVertex(InputError):
    pass


class IsolatedBoundaryVertex(InputError):
    """A boundary vertex with no interior neighbour cannot be projected."""


# -- dynamics ---------------------------------------------------------------

class NegativeInitial(InputError):
    pass


class StepSizeUnstable(NumericalError):
    """State left the invariant rectangle and halving reached dt_min."""


# -- spectral / steady states / monotone method -----------------------------

class NoConvergence(NumericalError):
    pass


class HypothesisNotMet(InputError):
    """Fields fed to a maximum-principle check violate its hypotheses."""


class PairInvalid(InputError):
    """Candidate upper/lower pair fails the coupled-pair inequalities."""


class RegimeMismatch(InputError):
    pass


class EpsilonTooLarge(InputError):
    pass


class NoAdmissibleSigma(InputError):
    """State too close to zero for the envelope constraints."""


class NoPositiveState(InputError):
    """Subcritical growth rate: the only nonnegative steady state is 0."""


class ConditionK1Violated(InputError):
    """The coexistence smallness condition on both growth margins fails."""


class DeltaTooLarge(InputError):
    pass


# -- classification ---------------------------------------------------------

class DegenerateTriangle(InputError):
    """b1*c2 - b2*c1 = 0: the interior equilibrium is undefined."""


class RequiresSteadySolve(InputError):
    """Predicted limit needs spectral/steady inputs that were not given."""


# -- CLI --------------------------------------------------------------------

class ConfigInvalid(InputError):
    pass


class UnknownExample(InputError):
    pass


class GridTooLarge(InputError):
    pass
