#
# __common__.py - Common classes and constants
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

from enum import Enum


class Constants:
    '''
    Various constants
    '''
    #
    # Default nominal levels of the size experiments
    #
    nominal_levels = (0.10, 0.05, 0.01)

    #
    # Replication count of the published size and power experiments
    #
    replications = 15000

    #
    # Schema version of the JSON reports. Must be increased whenever a field is
    # renamed or removed.
    #
    report_schema_version = 1


class Statistic (str, Enum):
    '''
    @brief Test statistic id

    The values are used as column names in every written report, so they
    are part of the stable output contract.
    '''
    WALD = 'S_W'
    LR = 'S_LR'
    SCORE = 'S_R'
    GRADIENT = 'S_T'
    LR_CORRECTED = 'S*_LR'
    SCORE_CORRECTED = 'S*_R'
    GRADIENT_CORRECTED = 'S*_T'

    @property
    def corrected(self):
        return self.value.startswith('S*')

    @staticmethod
    def table_order():
        '''
        Column order of the published tables: Wald first, then LR, score, gradient and the corrected
        statistics in the same order
        '''
        return [Statistic.WALD, Statistic.LR, Statistic.SCORE, Statistic.GRADIENT,
                Statistic.LR_CORRECTED, Statistic.SCORE_CORRECTED, Statistic.GRADIENT_CORRECTED]

    @staticmethod
    def corrected_only():
        return [Statistic.LR_CORRECTED, Statistic.SCORE_CORRECTED, Statistic.GRADIENT_CORRECTED]


class CorrectionKind (str, Enum):
    '''
    @brief Family of a Bartlett or Bartlett-type correction
    '''
    LR = 'LR'
    SCORE = 'Score'
    GRADIENT = 'Gradient'


class ExitCode:
    '''
    Command line exit codes. These are a stable contract.
    '''
    SUCCESS = 0
    USAGE = 2
    DATA = 3
    NUMERICAL = 4
    FILE = 5
