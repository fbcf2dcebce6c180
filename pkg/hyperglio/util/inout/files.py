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
import os
from pathlib import Path
from typing import Optional
from typing import Union
from uuid import uuid4


log = logging.getLogger(__name__)


# ========================================================================= #
# Atomic file saving                                                        #
# ========================================================================= #


class AtomicSaveFile(object):
    """
    Data is written to a temporary file next to the target, the temporary
    file is only moved onto the target once the context exits without error.
    A partially written artifact never appears at the target path.

    ```
    with AtomicSaveFile('cube.hsic', open_mode='wb') as (tmp_path, fp):
        fp.write(b'HSIC')
    ```
    """

    def __init__(
        self,
        file: Union[str, Path],
        open_mode: Optional[str] = None,
        overwrite: bool = False,
        makedirs: bool = True,
    ):
        if not file or not Path(file).name:
            raise ValueError(f'file must not be empty: {repr(file)}')
        self.trg_file = Path(file).absolute()
        self.tmp_file = self.trg_file.with_name(f'.temp.{uuid4()}.{self.trg_file.name}')
        self._open_mode = open_mode
        self._overwrite = overwrite
        self._makedirs = makedirs
        self._resource = None

    def __enter__(self):
        if self.trg_file.exists():
            if not self._overwrite:
                raise FileExistsError(f'the target file already exists: {self.trg_file}, set overwrite=True to ignore this error.')
            if not self.trg_file.is_file():
                raise FileExistsError(f'the target file exists but is not a file: {self.trg_file}')
        if self._makedirs:
            self.tmp_file.parent.mkdir(parents=True, exist_ok=True)
        if self._open_mode is None:
            return str(self.tmp_file)
        self._resource = open(self.tmp_file, self._open_mode)
        return str(self.tmp_file), self._resource

    def __exit__(self, error_type, error, traceback):
        if self._resource is not None:
            self._resource.close()
            self._resource = None
        # remove partial output
        if error_type is not None:
            if self.tmp_file.exists():
                self.tmp_file.unlink()
                log.error(f'An error occurred in {self.__class__.__name__}, cleaned up temporary file: {self.tmp_file}')
            return
        if not self.tmp_file.exists():
            raise FileNotFoundError(f'the temporary file was not created: {self.tmp_file}')
        os.replace(self.tmp_file, self.trg_file)
        log.debug(f'saved: {self.trg_file}')


def ensure_dir(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_text(path: Union[str, Path], text: str, overwrite: bool = True) -> Path:
    with AtomicSaveFile(path, open_mode='w', overwrite=overwrite) as (_, fp):
        fp.write(text)
    return Path(path)


def write_json(path: Union[str, Path], obj, overwrite: bool = True) -> Path:
    """Deterministic json, keys sorted, so repeated runs give byte-identical files."""
    import json
    return write_text(path, json.dumps(obj, indent=2, sort_keys=True) + '\n', overwrite=overwrite)


def read_json(path: Union[str, Path]):
    import json
    with open(path, 'r') as fp:
        return json.load(fp)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
