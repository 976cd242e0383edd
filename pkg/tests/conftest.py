"""Session fixtures shared by the evaluation and runtime tests.

Training even a small model takes seconds, so the corpus, the trained
phase-gated model and the fitted classifier are built once per session.
The corpus is two well-separated styles at 30 fps with enough steady
walking to carve transfer scripts from.
"""

import pytest

from motionstyle.evaluation import StyleClassifier
from motionstyle.features.dataset import build_dataset
from motionstyle.features.synthetic import (DEFAULT_STYLES,
                                            generate_synthetic_corpus)
from motionstyle.models.variants import ModelConfig
from motionstyle.training import SamplingSchedule, TrainConfig, train


@pytest.fixture(scope="session")
def eval_corpus():
    clips = generate_synthetic_corpus(DEFAULT_STYLES[:2],
                                      seconds_per_style=12.0, fps=30,
                                      seed=11)
    return build_dataset(clips)


@pytest.fixture(scope="session")
def trained_phase(eval_corpus):
    cfg = TrainConfig(
        model=ModelConfig(variant="phase", n_experts=4, n_moe_layers=2,
                          moe_hidden=96, gating_hidden=48, dropout_rate=0.0),
        batch_size=16, epochs=100, rollout_length=8,
        schedule=SamplingSchedule(), seed=1)
    model, _ = train(eval_corpus, cfg)
    return model


@pytest.fixture(scope="session")
def style_classifier(eval_corpus):
    return StyleClassifier.fit(eval_corpus)
