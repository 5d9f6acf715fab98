"""Exception hierarchy shared across the package."""


class AxplanError(Exception):
    """Base class for all errors raised by axplan."""


class SasSyntaxError(AxplanError):
    def __init__(self, message, line=None, section=None):
        where = []
        if section is not None:
            where.append("section %s" % section)
        if line is not None:
            where.append("line %d" % line)
        if where:
            message = "%s (%s)" % (message, ", ".join(where))
        super().__init__(message)
        self.line = line
        self.section = section


class UnsupportedFeature(AxplanError):
    pass


class StratificationError(AxplanError):
    pass


class NotStratified(AxplanError):
    pass


class TooLarge(AxplanError):
    pass


class NotSupported(AxplanError):
    """Raised when a level ranking is requested for a non-supported model."""


class InvalidRule(AxplanError):
    pass


# Plan execution and validation.

class PlanError(AxplanError):
    pass


class NotApplicable(PlanError):
    def __init__(self, op_name, step=None):
        if step is None:
            msg = "operator %r is not applicable" % op_name
        else:
            msg = "operator %r is not applicable at step %d" % (op_name, step)
        super().__init__(msg)
        self.op_name = op_name
        self.step = step


class ConflictingEffects(PlanError):
    pass


class GoalUnsatisfied(PlanError):
    pass


class StepConflict(PlanError):
    def __init__(self, step, op1, op2):
        super().__init__("operators %r and %r conflict at step %d"
                         % (op1, op2, step))
        self.step = step
        self.op1 = op1
        self.op2 = op2


class ForallWithAxioms(PlanError):
    def __init__(self, message="forall semantics is not available for tasks with axioms"):
        super().__init__(message)


class InvalidPlan(PlanError):
    pass


class StateSpaceTooLarge(AxplanError):
    pass


# Encoders and decoders.

class MalformedModel(AxplanError):
    pass


class MalformedAssignment(AxplanError):
    pass


class ConditionalEffectsUnsupported(AxplanError):
    pass


class ValidationFailure(AxplanError):
    """A decoded plan was rejected by the validator (an encoder bug)."""
