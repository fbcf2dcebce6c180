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
import time

import pytorch_lightning as pl


log = logging.getLogger(__name__)


# ========================================================================= #
# Progress                                                                  #
# ========================================================================= #


class LoggerProgressCallback(pl.Callback):
    """
    Log training progress at most once every `interval` seconds, used
    instead of a progress bar so that output ends up in the run log.
    """

    def __init__(self, interval: float = 10, log_level: int = logging.INFO, prefix: str = ''):
        if interval <= 0:
            raise ValueError(f'interval must be positive, got: {repr(interval)}')
        self._interval = interval
        self._log_level = log_level
        self._prefix = prefix
        self._start_time = self._last_time = time.time()

    def on_train_start(self, trainer: pl.Trainer, pl_module: pl.LightningModule):
        self._start_time = self._last_time = time.time()

    def on_train_batch_end(self, trainer: pl.Trainer, pl_module: pl.LightningModule, *args, **kwargs):
        now = time.time()
        if now - self._last_time > self._interval:
            self._last_time = now
            self._log_progress(trainer, elapsed_sec=now - self._start_time)

    def _log_progress(self, trainer: pl.Trainer, elapsed_sec: float):
        max_batches = max(1, trainer.num_training_batches)
        max_epochs = trainer.max_epochs if (trainer.max_epochs is not None and trainer.max_epochs > 0) else 1
        max_steps = max_epochs * max_batches
        # progress
        global_step = trainer.global_step + 1
        epoch = trainer.current_epoch + 1
        batch = (global_step - 1) % max_batches + 1
        train_pct = min(1.0, global_step / max_steps)
        train_remain_time = elapsed_sec * (1 - train_pct) / train_pct
        if global_step >= elapsed_sec:
            step_speed_str = f'{global_step / max(elapsed_sec, 1e-9):4.2f}it/s'
        else:
            step_speed_str = f'{elapsed_sec / global_step:4.2f}s/it'
        # metrics, loss entries first
        info_dict = {
            k: f'{float(v):.4g}' if hasattr(v, '__float__') else f'{v}'
            for k, v in trainer.progress_bar_metrics.items()
        }
        sorted_k = sorted(info_dict.keys(), key=lambda k: ('loss' != k.lower(), 'loss' not in k.lower(), k))
        log.log(
            level=self._log_level,
            msg=f'{self._prefix}[{int(elapsed_sec)}s, {step_speed_str}] '
                + f'EPOCH: {epoch}/{max_epochs} - {int(global_step):0{len(str(max_steps))}d}/{max_steps} '
                + f'({int(train_pct * 100):02d}%) [rem. {int(train_remain_time)}s] '
                + f'STEP: {int(batch):{len(str(max_batches))}d}/{max_batches} '
                + f'| {" ".join(f"{k}={info_dict[k]}" for k in sorted_k)}'
        )


# ========================================================================= #
# END                                                                       #
# ========================================================================= #
