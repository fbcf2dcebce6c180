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

import copy
import logging
import math
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional

import pytorch_lightning as pl
import torch

from hyperglio.util.strings import fmt_metrics


log = logging.getLogger(__name__)


# ========================================================================= #
# History & Best State                                                      #
# ========================================================================= #


class HistoryCallback(pl.Callback):
    """
    Evaluate the module at the end of every training epoch and record
    the returned metrics. `eval_fn` receives the module in eval mode
    without gradients, the previous mode is restored afterwards.
    """

    def __init__(self, eval_fn: Callable[[pl.LightningModule], Dict[str, float]], log_level: int = logging.DEBUG):
        self._eval_fn = eval_fn
        self._log_level = log_level
        self.history: List[Dict[str, float]] = []

    def on_train_epoch_end(self, trainer: pl.Trainer, pl_module: pl.LightningModule, *args, **kwargs):
        was_training = pl_module.training
        pl_module.eval()
        try:
            with torch.no_grad():
                metrics = {k: float(v) for k, v in self._eval_fn(pl_module).items()}
        finally:
            pl_module.train(was_training)
        record = {'epoch': trainer.current_epoch + 1, **metrics}
        self.history.append(record)
        log.log(self._log_level, f'epoch {record["epoch"]}: {fmt_metrics(metrics)}')


class BestStateCallback(pl.Callback):
    """
    Keep a copy of the module state with the lowest value of a monitored
    history metric. Ties keep the earlier epoch.
    """

    def __init__(self, history: HistoryCallback, monitor: str = 'val_loss'):
        self._history = history
        self.monitor = monitor
        self.best_value: float = math.inf
        self.best_epoch: Optional[int] = None
        self.best_state: Optional[dict] = None

    def on_train_epoch_end(self, trainer: pl.Trainer, pl_module: pl.LightningModule, *args, **kwargs):
        if not self._history.history:
            return
        record = self._history.history[-1]
        if self.monitor not in record:
            raise KeyError(f'monitored metric {repr(self.monitor)} is not recorded, available metrics: {sorted(record)}')
        value = record[self.monitor]
        if (self.best_state is None) or (value < self.best_value):
            self.best_value = value
            self.best_epoch = record['epoch']
            self.best_state = copy.deepcopy(pl_module.state_dict())

    def restore(self, pl_module: torch.nn.Module):
        if self.best_state is None:
            raise RuntimeError('no state was recorded, training did not complete an epoch')
        pl_module.load_state_dict(self.best_state)


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
