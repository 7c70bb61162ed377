#
# __encoding__.py - JSON and CSV encodings of fits, test reports and rate tables
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

import io
import json

from enum import Enum

import numpy as np
import pandas as pd

from glmcorr.__common__ import Constants


class JsonEncoder:
    '''
    Encoder for the JSON reports

    Objects taking part in the encoding implement `__json__`, returning a dictionary of their fields.
    Floats are written with their shortest exact representation, so decoding a report recovers every
    value bit by bit.
    '''

    @staticmethod
    def encode_traits(obj):
        '''
        @brief Convert objects into JSON compatible types

        @param obj Python object to be encoded
        @return Object made of dictionaries, lists, strings, numbers, booleans and None
        '''

        if hasattr(obj, '__json__'):
            return {k: JsonEncoder.encode_traits(v) for k, v in obj.__json__().items()}

        elif isinstance(obj, Enum):
            return obj.value

        elif isinstance(obj, dict):
            return {str(JsonEncoder.encode_traits(key)): JsonEncoder.encode_traits(value) for key, value in obj.items()}

        elif isinstance(obj, (list, tuple)):
            return [JsonEncoder.encode_traits(i) for i in obj]

        elif isinstance(obj, np.ndarray):
            return [JsonEncoder.encode_traits(i) for i in obj.tolist()]

        elif isinstance(obj, np.bool_):
            return bool(obj)

        elif isinstance(obj, np.integer):
            return int(obj)

        elif isinstance(obj, np.floating):
            return float(obj)

        return obj

    @staticmethod
    def encode(obj, indent=2):
        return json.dumps(JsonEncoder.encode_traits(obj), indent=indent)

    @staticmethod
    def decode(text):
        return json.loads(text)


def report_document(kind, payload, **extra):
    '''
    Versioned top level JSON document
    '''
    document = {'schema_version': Constants.report_schema_version, 'kind': kind}
    document.update(extra)
    document['result'] = payload
    return JsonEncoder.encode(document)


class CsvEncoder:
    '''
    Tabular encodings. All tables are built as pandas data frames and written with a header row.
    '''

    @staticmethod
    def test_report_frame(report):
        return pd.DataFrame([{'hypothesis': report.hypothesis,
                              'statistic': r.name.value,
                              'value': r.value,
                              'df': r.df,
                              'p_value': r.p_value,
                              'flagged': r.flagged} for r in report.records])

    @staticmethod
    def rate_table_frame(table):
        sc = table.scenario
        return pd.DataFrame([{'family': sc.family.value, 'n': sc.n, 'p': sc.p, 'q': sc.q, 'phi': sc.phi_true,
                              'delta': sc.delta, 'statistic': s.value, 'level': a, 'rate': r, 'mcse': e,
                              'used': u, 'flagged': f, 'failed': table.failed}
                             for s, a, r, e, u, f in table.rows()])

    @staticmethod
    def coefficient_frame(rows):
        return pd.DataFrame([row.__json__() for row in rows])

    @staticmethod
    def encode(frame):
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format='%.10g', lineterminator='\n')
        return buffer.getvalue()
