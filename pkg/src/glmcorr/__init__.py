#
# __init__.py - Corrected likelihood based tests in generalized linear models
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
'''
Likelihood ratio, Wald, score and gradient tests in generalized linear models together with their
Bartlett and Bartlett-type corrected versions.

The numerical functionality lives in the `glmcorr.api` subpackages, the command line front end in
`glmcorr.__cli__`.
'''

from glmcorr.__errors__ import (ConvergenceError, DataError, DegenerateError, DomainError,
                                FitMismatchError, GlmError, InputFileError, ScenarioError, SimulationError,
                                SingularDesignError)

__version__ = '1.0.0'
