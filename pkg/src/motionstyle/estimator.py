"""Estimator facade: fit on labeled clips, synthesize under scripted control.

Follows the usual estimator conventions: constructor arguments are stored
verbatim, fit() learns the trailing-underscore attributes and returns self,
get_params/set_params expose the constructor surface. The heavy lifting
lives in the training, models and evaluation packages; interactive frame
streams are the runtime package's SessionState.
"""

from __future__ import annotations

import inspect

import numpy as np

from .errors import ConfigError, NumericError
from .evaluation import ControlScript, drive, replay_suite
from .features import MotionDataset, build_dataset
from .models import ModelConfig, read_checkpoint, write_checkpoint
from .nn import OptimizerConfig
from .training import TrainConfig, train


class MotionSynthesizer:
    """Style-conditioned next-frame motion model with a small fit/predict API.

    fit() accepts either a list of labeled MotionClips or a prebuilt
    MotionDataset. predict() rolls the trained model out under a
    ControlScript, feeding its own output back, and returns the generated
    pose channels.
    """

    def __init__(self, variant: str = "phase", n_experts: int = 4,
                 n_moe_layers: int = 3, moe_hidden: int = 256,
                 gating_hidden: int = 128, dropout_rate: float = 0.4,
                 tcn_channels: tuple = (128, 128, 64), tcn_kernel: int = 5,
                 history_frames: int = 30, win_std_floor: float = 0.3,
                 epochs: int = 100, batch_size: int = 64,
                 rollout_length: int = 8, learning_rate: float = 1e-3,
                 weight_decay: float = 1e-5, seed: int = 0):
        self.variant = variant
        self.n_experts = n_experts
        self.n_moe_layers = n_moe_layers
        self.moe_hidden = moe_hidden
        self.gating_hidden = gating_hidden
        self.dropout_rate = dropout_rate
        self.tcn_channels = tcn_channels
        self.tcn_kernel = tcn_kernel
        self.history_frames = history_frames
        self.win_std_floor = win_std_floor
        self.epochs = epochs
        self.batch_size = batch_size
        self.rollout_length = rollout_length
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.seed = seed

    # ------------------------------------------------------------- params

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [name for name in sig.parameters if name != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "MotionSynthesizer":
        known = self._param_names()
        for name, value in params.items():
            if name not in known:
                raise ConfigError(
                    f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def _train_config(self) -> TrainConfig:
        model = ModelConfig(
            variant=self.variant, n_experts=self.n_experts,
            n_moe_layers=self.n_moe_layers, moe_hidden=self.moe_hidden,
            gating_hidden=self.gating_hidden, dropout_rate=self.dropout_rate,
            tcn_channels=tuple(self.tcn_channels), tcn_kernel=self.tcn_kernel,
            history_frames=self.history_frames,
            win_std_floor=self.win_std_floor)
        return TrainConfig(
            model=model, batch_size=self.batch_size, epochs=self.epochs,
            rollout_length=self.rollout_length,
            optimizer=OptimizerConfig(learning_rate=self.learning_rate,
                                      weight_decay=self.weight_decay),
            seed=self.seed).validated()

    def _fitted_model(self, doing: str):
        model = getattr(self, "model_", None)
        if model is None:
            raise ConfigError(f"this {type(self).__name__} is not fitted "
                              f"yet; call fit before {doing}")
        return model

    # -------------------------------------------------------------- fit

    def fit(self, X, y=None) -> "MotionSynthesizer":
        """Train on labeled clips (or a prebuilt dataset); returns self."""
        ds = X if isinstance(X, MotionDataset) else build_dataset(list(X))
        self.model_, self.report_ = train(ds, self._train_config())
        self.style_names_ = ds.style_names
        self.fps_ = ds.fps
        return self

    # ---------------------------------------------------------- predict

    def seed_pose(self) -> np.ndarray:
        """Corpus-mean standing pose with the velocity channels zeroed."""
        model = self._fitted_model("seed_pose")
        n_pose = model.meta.pose_dim
        pose = model.meta.stats.input_mean[:n_pose].astype(np.float32).copy()
        pose[9 * model.meta.skeleton.n_joints:] = 0.0
        return pose

    def predict(self, script: ControlScript,
                seed_pose: np.ndarray | None = None) -> np.ndarray:
        """Generated pose channels (n_frames, pose_dim) under the script."""
        model = self._fitted_model("predict")
        if seed_pose is None:
            seed_pose = self.seed_pose()
        result = drive(model, seed_pose, script)
        if not result.completed:
            raise NumericError(
                f"synthesis went non-finite after {result.pose.shape[0]} "
                f"of {script.n_frames} frames")
        return result.pose

    def score(self, X) -> float:
        """Negative mean squared replay error across the dataset's clips."""
        model = self._fitted_model("score")
        ds = X if isinstance(X, MotionDataset) else build_dataset(list(X))
        errors = np.concatenate([r.errors for r in replay_suite(model, ds)])
        return -float(errors.mean())

    # ------------------------------------------------------------ saving

    def save(self, path) -> None:
        write_checkpoint(self._fitted_model("save"), path)

    @classmethod
    def load(cls, path) -> "MotionSynthesizer":
        """Estimator around a saved checkpoint; training params stay default."""
        model = read_checkpoint(path)
        est = cls(**{f: getattr(model.config, f)
                     for f in ModelConfig.__dataclass_fields__})
        est.model_ = model
        est.style_names_ = model.meta.style_names
        est.fps_ = model.meta.fps
        return est
