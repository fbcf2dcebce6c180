#  ~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~
#  MIT License
#
#  Copyright (c) 2021 Nathan Juraj Michlo
#
#  Permission is hereby granted, free of charge, to any person obtaining a copy
#  of this software and associated documentation files (the "Software"), to deal
#  in the Software without restriction, including without limitation the rights
#  to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
#  copies of the Software, and to permit persons to whom the Software is
#  furnished to do so, subject to the following conditions:
#
#  The above copyright notice and this permission notice shall be included in
#  all copies or substantial portions of the Software.
#
#  THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
#  IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
#  FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
#  AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
#  LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
#  OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
#  SOFTWARE.
#  ~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~=~


import logging
import sys

from hyperglio.pipeline import ConfigValidationError
from hyperglio.pipeline import StageError


log = logging.getLogger(__name__)


# ========================================================================= #
# EXIT CODES                                                                #
# ========================================================================= #


EXIT_SUCCESS = 0
EXIT_CONFIG_ERROR = 1
EXIT_STAGE_ERROR = 2


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, StageError):
        return EXIT_STAGE_ERROR
    # invalid configs and any other failure outside a stage
    return EXIT_CONFIG_ERROR


def log_error_and_exit(err_type: str, err_msg: str, exit_code: int = EXIT_CONFIG_ERROR, exc_info=True):
    # truncate error
    err_msg = err_msg[:244] + ' <TRUNCATED>' if len(err_msg) > 244 else err_msg
    log.error(f'exiting: {err_type} | {err_msg}', exc_info=exc_info)
    sys.exit(exit_code)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
