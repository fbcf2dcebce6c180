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

from typing import Callable
from typing import Dict
from typing import Generic
from typing import Iterator
from typing import List
from typing import Mapping
from typing import Tuple
from typing import TypeVar
from typing import Union

from hyperglio.util.imports import import_obj_partial


V = TypeVar('V')
AliasesHint = Union[str, Tuple[str, ...]]


# ========================================================================= #
# Provided Values                                                           #
# ========================================================================= #


class LazyImport(Generic[V]):
    """
    Import path to a callable object, only imported when first needed.
    Extra args and kwargs partially parameterize the object, the partial
    is returned and not called.
    """

    def __init__(self, import_path: str, *partial_args, **partial_kwargs):
        self._import_path = import_path
        self._partial_args = partial_args
        self._partial_kwargs = partial_kwargs
        self._value = None

    def get(self) -> V:
        if self._value is None:
            self._value = import_obj_partial(self._import_path, *self._partial_args, **self._partial_kwargs)
        return self._value

    def __repr__(self):
        return f'{self.__class__.__name__}({repr(self._import_path)})'


# ========================================================================= #
# Registry                                                                  #
# ========================================================================= #


class Registry(Mapping[str, V]):
    """
    Named lazy imports. Keys must be identifiers and cannot be overwritten.
    ```
    OPTIMIZERS['adam'] = LazyImport('torch.optim.Adam')
    OPTIMIZERS['adam']  # -> torch.optim.Adam
    ```
    """

    def __init__(self, name: str):
        if not str.isidentifier(name):
            raise ValueError(f'Registry names must be valid identifiers, got: {repr(name)}')
        self._name = name
        self._providers: Dict[str, LazyImport[V]] = {}

    @property
    def name(self) -> str:
        return self._name

    @property
    def examples(self) -> List[str]:
        return list(self._providers.keys())

    def __setitem__(self, aliases: AliasesHint, v: LazyImport[V]):
        aliases = (aliases,) if isinstance(aliases, str) else tuple(aliases)
        if len(aliases) < 1:
            raise ValueError(f'At least one alias must be provided to registry: {repr(self.name)}')
        if not isinstance(v, LazyImport):
            raise TypeError(f'Values stored in {self.__class__.__name__} must be instances of: {LazyImport.__name__}, got: {repr(v)}')
        for k in aliases:
            if not str.isidentifier(k):
                raise ValueError(f'Keys stored in registry: {repr(self.name)} must be valid identifiers, got: {repr(k)}')
            if k in self._providers:
                raise RuntimeError(f'Tried to overwrite existing key: {repr(k)} in registry: {repr(self.name)}')
        for k in aliases:
            self._providers[k] = v

    def __getitem__(self, k: str) -> V:
        if k not in self._providers:
            raise KeyError(f'{repr(k)} is not in registry: {repr(self.name)}, valid keys are: {sorted(self._providers)}')
        return self._providers[k].get()

    def __contains__(self, k) -> bool:
        return k in self._providers

    def __iter__(self) -> Iterator[str]:
        yield from self._providers

    def __len__(self) -> int:
        return len(self._providers)

    def __repr__(self):
        return f'{self.__class__.__name__}({self._name})'


def resolve(registry: Registry[Callable], name: str) -> Callable:
    """Look up a name in the registry, otherwise treat it as an import path."""
    from hyperglio.util.imports import import_obj
    if name in registry:
        return registry[name]
    try:
        return import_obj(name)
    except (ImportError, ValueError):
        raise KeyError(f'invalid name: {repr(name)} for registry: {repr(registry.name)}, valid names are: {sorted(registry)}, or an import path, eg. `torch.optim.Adam`')


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
