#
# __config__.py - Global configuration
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

#
# IRLS convergence: relative deviance change AND score sup-norm must both fall below
# their tolerance before the fit is accepted
#
irls_tol_deviance = 1e-12
irls_tol_score = 1e-8
irls_max_iter = 100

# Number of step halvings allowed when the mean leaves the family domain
irls_max_halvings = 30

# Precision estimate: relative step tolerance and Newton iteration limit
phi_tol = 1e-10
phi_max_iter = 50

#
# Simulation: fraction of failed replications which triggers a warning and the
# fraction which aborts the run
#
sim_failure_warn = 0.005
sim_failure_limit = 0.02

# Default number of simulation worker processes
sim_workers = 1

# Structured run event logging (see __logging__.RunLogger)
log_events = False
log_dir = None
