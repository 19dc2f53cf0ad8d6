"""
Common exceptions.

Every exception knows the exit code the command line should terminate with.
"""


class HDLException(Exception):
    """
    All exceptions subclass this. All exceptions can:
        - Write something useful to the log.
        - Reply to the user with some relevant response.
    """
    exit_code = 1

    def __init__(self, msg=None, lvl='info'):
        super().__init__()
        self.log_level = lvl
        self.message = msg

    def reply(self):
        """
        Construct a reponse to user.
        """
        return self.message

    def __str__(self):
        return str(self.reply())

    def write_log(self, log, *, command, config=None):
        """
        Log all relevant information about this run.
        """
        log_func = getattr(log, self.log_level)
        header = '\n{}\n{}\n'.format(self.__class__.__name__ + ': ' + str(self.reply()), '=' * 20)
        log_func(header + log_format(command=command, config=config))


class UserException(HDLException):
    """
    Exception occurred usually due to user error.

    Not unexpected but can indicate a problem.
    """
    exit_code = 4


class ArgumentParseError(UserException):
    """ Error raised on failure to parse arguments. """


class ArgumentHelpError(UserException):
    """ Error raised on request to print help for command. """
    exit_code = 0


class InvalidCommandArgs(UserException):
    """ Unable to process command due to bad arguements.  """


class InvalidConfig(UserException):
    """ A configuration value violates its invariant. """


class MissingConfigFile(UserException):
    """ A required configuration file is not present. """


class ExprParseError(UserException):
    """
    Operator text did not conform to the grammar.

    Attributes:
        position: 0-based offset of the offending token in the text, None if not known.
    """
    def __init__(self, msg=None, *, position=None, text=None):
        super().__init__(msg)
        self.position = position
        self.text = text

    def reply(self):
        if self.position is None:
            return self.message

        msg = '{} at position {}'.format(self.message, self.position)
        if self.text is not None:
            msg += '\n    {}\n    {}^'.format(self.text, ' ' * self.position)
        return msg


class AlgebraError(HDLException):
    """ The symbolic engine refused an operation. """
    exit_code = 3


class OrderingViolation(AlgebraError):
    """ A p-inverse factor would have to move past a position factor. """
    def __init__(self, msg='p-inverse ordering violation', lvl='info'):
        super().__init__(msg, lvl)


class NonCommutingResidue(AlgebraError):
    """ The residue R of a p-inverse part does not commute with p^2. """
    def __init__(self, msg='non-commuting residue under p^2', lvl='info'):
        super().__init__(msg, lvl)


class UnverifiableStructure(AlgebraError):
    """ A generator block cannot be brought into a checkable form. """


class NumericError(HDLException):
    """ Base for failures of the finite dimensional realization. """


class DimensionCapError(NumericError):
    """ Requested dense dimension is above the configured cap. """


class SpectralGapError(NumericError):
    """ Eigenvalues cannot be split into clusters at the requested tolerance. """


class LeakageError(NumericError):
    """ An operator maps an eigenspace too far outside itself. """


class DomainError(NumericError):
    """ A square root or level formula received an argument outside its domain. """


class RootSolveError(NumericError):
    """ The level equation could not be solved reliably. """
    exit_code = 2


class LadderMismatch(NumericError):
    """ Restricted D3 spectrum does not form the predicted weight ladder. """
    def __init__(self, msg=None, *, observed=None, predicted=None):
        super().__init__(msg)
        self.observed = observed
        self.predicted = predicted

    def reply(self):
        return '{}\n    observed:  {}\n    predicted: {}'.format(
            self.message, self.observed, self.predicted)


class CheckFailed(HDLException):
    """ An assertion of a run failed. Message names the equation it tests. """
    exit_code = 1


class SymbolicMismatch(HDLException):
    """ Symbolic verdicts differ from the expected conserved/non-conserved split. """
    exit_code = 3


def log_format(*, command, config=None):
    """ Log useful information about the run that failed. """
    msg = "Command: {}".format(command)
    if config is not None:
        msg += "\n    Config: {!r}".format(config)

    return msg
