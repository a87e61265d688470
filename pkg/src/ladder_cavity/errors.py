"""Exception hierarchy shared by the solvers and the command-line front end."""


class ParameterError(ValueError):
    """Physical or numerical parameters outside their valid range."""


class SolverError(RuntimeError):
    """A solve failed and produced no trustworthy result."""


class StiffnessError(SolverError):
    """The adaptive integrator could not take a step.

    Attributes
    ----------
    t_reached : float
        Last time the integrator reached before giving up.
    """

    def __init__(self, message, t_reached):
        super().__init__(f"{message} (t reached = {t_reached!r})")
        self.t_reached = t_reached


class TruncationOverflow(SolverError):
    """Fock-space tail mass stayed above tolerance at the largest allowed n_max."""

    def __init__(self, message, n_max, tail):
        super().__init__(f"{message} (n_max = {n_max}, tail = {tail:.3e})")
        self.n_max = n_max
        self.tail = tail


class SingularSystemError(SolverError):
    """The constrained steady-state linear system could not be solved."""


class ConvergenceError(SolverError):
    """An iterative procedure exhausted its step budget."""


class NonPhysicalStateError(SolverError):
    """A computed density matrix violates positivity or trace bounds."""
