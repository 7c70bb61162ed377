#
# __errors__.py - Exception types
#
# (C) 2026 glmcorr developers
#
# Redistribution and use in source and binary forms, with or without modification, are permitted
# provided that the above copyright notice and the following disclaimer are retained.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS" AND ANY EXPRESS OR IMPLIED
# WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A
# PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR
# ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES ARISING IN ANY WAY OUT OF
# THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE POSSIBILITY OF SUCH DAMAGE.
#

from glmcorr.__common__ import ExitCode


class GlmError (RuntimeError):
    '''
    @brief Base class of all errors raised by the library

    Every error carries a short human readable description, a stable error code and an optional
    detail text. The error code is meant for scripts parsing the command line output, the description
    for humans.
    '''

    error_code = 'GLM-0000'
    exit_code = ExitCode.NUMERICAL

    def __init__(self, description, detail=''):

        super().__init__(description, detail)

        self.description = description
        self.detail = detail

    def __str__(self):
        if self.detail and not self.detail.startswith(self.description):
            return '{code}: {description}\n\n{detail}'.format(code=self.error_code, description=self.description, detail=self.detail)

        return '{code}: {description}'.format(code=self.error_code, description=self.description)

    def __repr__(self):
        return '{name}: code={code}, description={description}, detail={detail}'.format(
            name=type(self).__name__, code=self.error_code, description=self.description, detail=self.detail)

    # enable pickle support, errors travel back from simulation worker processes
    def __reduce__(self):
        return (self.__class__, (self.description, self.detail))


class DomainError (GlmError, ValueError):
    '''
    @brief Argument outside the domain of a function, family or link

    If the violation is bound to a single observation, its index is available as `index`.
    '''

    error_code = 'GLM-0001'

    def __init__(self, description, detail='', index=None):
        super().__init__(description, detail)
        self.index = index

    def __reduce__(self):
        return (self.__class__, (self.description, self.detail, self.index))


class SingularDesignError (GlmError):
    '''
    @brief Rank deficient design or singular information matrix
    '''
    error_code = 'GLM-0002'


class ConvergenceError (GlmError):
    '''
    @brief Iterative solver did not converge

    The last iterate is kept in `last` so a caller can inspect how far the iteration got.
    '''

    error_code = 'GLM-0003'

    def __init__(self, description, detail='', last=None):
        super().__init__(description, detail)
        self.last = last

    def __reduce__(self):
        return (self.__class__, (self.description, self.detail, self.last))


class DegenerateError (GlmError):
    '''
    @brief Degenerate numerical situation, like a zero deviance or a vanishing d(2)
    '''
    error_code = 'GLM-0004'


class FitMismatchError (GlmError):
    '''
    @brief Unrestricted and restricted fits do not belong to the same data and hypothesis
    '''
    error_code = 'GLM-0005'


class DataError (GlmError):
    '''
    @brief Input data or configuration file cannot be used

    `line` is the 1-based line number of the offending input line, if known.
    '''

    error_code = 'GLM-0010'
    exit_code = ExitCode.DATA

    def __init__(self, description, detail='', line=None):
        super().__init__(description, detail)
        self.line = line

    def __reduce__(self):
        return (self.__class__, (self.description, self.detail, self.line))


class InputFileError (DataError):
    '''
    @brief Input data or configuration file is missing or cannot be opened
    '''

    error_code = 'GLM-0011'
    exit_code = ExitCode.FILE


class ScenarioError (GlmError):
    '''
    @brief Simulation scenario or hypothesis cannot be run
    '''
    error_code = 'GLM-0020'
    exit_code = ExitCode.USAGE


class SimulationError (GlmError):
    '''
    @brief Too many failed replications in a simulation run
    '''
    error_code = 'GLM-0021'
