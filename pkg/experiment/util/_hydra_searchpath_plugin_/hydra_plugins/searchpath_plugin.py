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

"""
Hydra only discovers search path plugins inside `hydra_plugins` packages,
this directory is added to `sys.path` by `experiment.util.hydra_main`.
"""

import logging
import os

from hydra.core.config_search_path import ConfigSearchPath
from hydra.plugins.search_path_plugin import SearchPathPlugin


log = logging.getLogger(__name__)


class HyperglioExperimentSearchPathPlugin(SearchPathPlugin):

    def manipulate_search_path(self, search_path: ConfigSearchPath) -> None:
        from experiment.util.hydra_main import _HYPERGLIO_CONFIG_DIRS
        paths = [
            *os.environ.get('HYPERGLIO_CONFIGS_PREPEND', '').split(';'),
            *(_HYPERGLIO_CONFIG_DIRS or []),
            *os.environ.get('HYPERGLIO_CONFIGS_APPEND', '').split(';'),
        ]
        log.debug(f' [hyperglio-search-path-plugin]: Activated hydra plugin: {self.__class__.__name__}')
        for path in paths:
            if path:
                log.debug(f' [hyperglio-search-path] - {repr(path)}')
                search_path.append(provider='hyperglio-searchpath-plugin', path=os.path.abspath(path))
