#
# __logging__.py - Structured run event logging
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

import enum
import logging
import os
import uuid

from datetime import datetime, timezone

import glmcorr.__config__


def get_default_log_dir():
    '''
    @brief Default directory for run event logs

    The directory is taken from the GLMCORR_LOG_DIR environment variable if set. Otherwise it is the
    glmcorr/log folder below %LOCALAPPDATA% on Windows and below $XDG_STATE_HOME (default
    ~/.local/state) elsewhere. The directory is created if necessary.

    @return Absolute path of the log directory
    '''
    log_dir = os.environ.get('GLMCORR_LOG_DIR')

    if not log_dir:
        if os.name == 'nt':
            base = os.environ.get('LOCALAPPDATA') or os.path.expanduser(r'~\AppData\Local')
        else:
            base = os.environ.get('XDG_STATE_HOME') or os.path.expanduser('~/.local/state')
        log_dir = os.path.join(base, 'glmcorr', 'log')

    log_dir = os.path.abspath(log_dir)
    os.makedirs(log_dir, exist_ok=True)
    return log_dir


class MillisecondFormatter(logging.Formatter):
    '''
    UTC timestamps with millisecond resolution, written as '%f' in the date format
    '''

    def formatTime(self, record, datefmt=None):
        stamp = datetime.fromtimestamp(record.created, tz=timezone.utc)
        if not datefmt:
            return stamp.isoformat(timespec='milliseconds')
        return stamp.strftime(datefmt.replace('%f', f'{stamp.microsecond // 1000:03d}'))


class RunLogger:
    '''
    Structured event log of fits, tests and simulation runs

    Every event is one line: UTC timestamp, process id, event type, event id, message and the
    position of the code which emitted it. Lines belonging together share an event id, e.g. all
    failed replications of one simulation run carry the run id.

    One file per process is written, named after the start time and the process id.
    '''

    domain = 'glmcorr.run'
    line_format = '%(asctime)s PID%(process)d [%(name)s] %(event_type)s %(event_id)s %(message)s (%(filename)s:%(lineno)d)'
    date_format = '%Y-%m-%dT%H:%M:%S.%fZ'

    class EventType(enum.Enum):
        '''
        Logged event types
        '''
        FIT = 'Fit'
        TEST = 'Test'
        SIMULATION = 'Simulation'
        REPLICATION = 'Replication'
        ERROR = 'Error'

    def __init__(self, log_dir=None):
        if log_dir is None:
            log_dir = get_default_log_dir()
        os.makedirs(log_dir, exist_ok=True)

        started = datetime.now(timezone.utc).strftime('%Y%m%dT%H%M%S')
        self.log_path = os.path.join(log_dir, f'glmcorr_{started}_{os.getpid()}.log')

        handler = logging.FileHandler(self.log_path, encoding='utf-8')
        handler.setFormatter(MillisecondFormatter(RunLogger.line_format, RunLogger.date_format))

        self.logger = logging.getLogger(RunLogger.domain)
        self.close()
        self.logger.addHandler(handler)
        self.logger.setLevel(logging.INFO)
        self.logger.propagate = False

    def log(self, event_type, event_id, message, stacklevel=1):
        '''
        @brief Write a single event line

        @param event_type Member of 'RunLogger.EventType' or any string
        @param event_id   Grouping id, usually a UUID
        @param message    Free text
        @param stacklevel Number of frames above the caller which is reported as the origin
        '''
        if isinstance(event_type, enum.Enum):
            event_type = event_type.value
        if isinstance(event_id, uuid.UUID):
            event_id = str(event_id)

        self.logger.info(message, stacklevel=stacklevel + 1,
                         extra={'event_type': event_type, 'event_id': event_id})

    def close(self):
        for handler in list(self.logger.handlers):
            handler.close()
            self.logger.removeHandler(handler)


__run_logger__ = None


def run_logger():
    '''
    Return the process wide run logger or 'None' if event logging is disabled

    The logger is created on first use when `__config__.log_events` is set.
    '''
    global __run_logger__

    if __run_logger__ is None and glmcorr.__config__.log_events:
        __run_logger__ = RunLogger(glmcorr.__config__.log_dir)

    return __run_logger__


def log_event(event_type, event_id, message):
    '''
    Log an event if event logging is enabled, otherwise do nothing
    '''
    logger = run_logger()
    if logger:
        logger.log(event_type, event_id, message, stacklevel=2)
