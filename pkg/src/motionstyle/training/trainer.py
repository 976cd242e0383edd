"""The epoch loop: shuffled rollout batches, Adam updates, telemetry."""

from __future__ import annotations

import csv
import os
import time

import numpy as np

from ..errors import NumericError
from ..models import model_from_dataset, write_checkpoint
from ..nn.optim import Adam
from .config import TrainConfig, TrainReport
from .rollout import (RolloutData, epoch_segments, rollout_batches,
                      rollout_plan, scheduled_rollout)

TELEMETRY_COLUMNS = ("epoch", "loss", "p", "wall_ms")


def _telemetry_row(path, values) -> None:
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(TELEMETRY_COLUMNS)
        writer.writerow(values)


def train(ds, cfg: TrainConfig, telemetry_path=None, checkpoint_path=None):
    """Train a fresh model of cfg.model on ds; returns (model, TrainReport).

    Dropout is active inside rollouts and off everywhere else. Runs abort
    with NumericError when a batch loss exceeds 1000 x the first batch
    loss of the run, or when a rollout loss stops being finite.
    """
    cfg = cfg.validated()
    model = model_from_dataset(cfg.model, ds, seed=cfg.seed)
    data = RolloutData(ds)
    opt = Adam(model.parameters(), cfg.optimizer)
    rng = np.random.default_rng([cfg.seed, 0x1B])   # distinct from init stream
    initial = None
    epoch_loss: list = []
    epoch_p: list = []
    run_start = time.perf_counter()
    for epoch in range(cfg.epochs):
        p = cfg.schedule.probability(epoch)
        tick = time.perf_counter()
        starts = epoch_segments(data, cfg.rollout_length, rng)
        batch_losses = []
        for batch in rollout_batches(data, starts, cfg.rollout_length,
                                     cfg.batch_size):
            plan = rollout_plan(model, batch, training=True, rng=rng)
            loss = scheduled_rollout(plan, p, rng)
            value = float(loss.data)
            if initial is None:
                initial = value
            if value > 1e3 * max(initial, 1e-8):
                raise NumericError(
                    f"training diverged at epoch {epoch}: batch loss "
                    f"{value:.6g} exceeds 1000 x initial {initial:.6g}")
            opt.zero_grad()
            loss.backward()
            opt.step()
            batch_losses.append(value)
        epoch_loss.append(float(np.mean(batch_losses)))
        epoch_p.append(p)
        if telemetry_path is not None:
            wall_ms = (time.perf_counter() - tick) * 1e3
            _telemetry_row(telemetry_path, [epoch, repr(epoch_loss[-1]),
                                            repr(p), f"{wall_ms:.3f}"])
    wall = time.perf_counter() - run_start
    if checkpoint_path is not None:
        write_checkpoint(model, checkpoint_path)
    return model, TrainReport(
        epoch_loss=epoch_loss, epoch_p=epoch_p, wall_seconds=wall,
        checkpoint_path=None if checkpoint_path is None
        else str(checkpoint_path))
