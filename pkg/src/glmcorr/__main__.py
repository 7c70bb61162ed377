#
# __main__.py - Entry point of 'python -m glmcorr'
#
# (C) 2026 glmcorr developers
#

import sys

from glmcorr.__cli__ import main

sys.exit(main())
