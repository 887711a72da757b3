"""Exception types shared across the package."""


class PursuitError(Exception):
    """Base class for all pursuitlab errors."""


class DomainError(PursuitError, ValueError):
    """A parameter is outside its mathematical domain (e.g. speed ratio >= 1)."""


class DegenerateStateError(PursuitError):
    """The state is degenerate for the requested operation (e.g. agents coincide)."""


class SingularPolicyError(PursuitError):
    """The pursuit law's steering vector vanished; the policy direction is undefined."""


class GeometryError(PursuitError):
    """The scenario geometry makes the requested strategy undefined (game already decided)."""


class ScenarioError(PursuitError, ValueError):
    """A scenario file failed to parse or validate.

    Carries a list of located error messages (one per problem found).
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
