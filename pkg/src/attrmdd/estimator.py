"""Estimator-style front end for the toy trainer.

Wraps corpus assembly, training, decoding, and scoring behind the familiar
fit/predict/score triple so the recognizer drops into pipelines and grid
searches; hyperparameters mirror TrainConfig field for field.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .decoding import decode_all
from .inventory import builtin_table, phoneme_sequence
from .sctc import make_layout
from .trainer import TrainConfig, Utterance, evaluate, train


class AttributeRecognizer(BaseEstimator):
    """Linear frame-to-attribute recognizer trained with the shared-blank loss.

    Parameters mirror TrainConfig; ``table`` is an AttributeTable or None for
    the packaged one.
    """

    def __init__(
        self,
        learning_rate=1e-4,
        weight_decay=0.005,
        epochs=30,
        batch_size=32,
        warmup_fraction=0.10,
        seed=0,
        table=None,
    ):
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.epochs = epochs
        self.batch_size = batch_size
        self.warmup_fraction = warmup_fraction
        self.seed = seed
        self.table = table

    def _config(self):
        return TrainConfig(
            learning_rate=self.learning_rate,
            weight_decay=self.weight_decay,
            epochs=self.epochs,
            batch_size=self.batch_size,
            warmup_fraction=self.warmup_fraction,
            seed=self.seed,
        )

    @staticmethod
    def _utterances(X, y):
        return [
            Utterance(features=features, phonemes=phoneme_sequence(phonemes))
            for features, phonemes in zip(X, y)
        ]

    def fit(self, X, y):
        """Fit on lists of (T, F) feature matrices and phoneme sequences."""
        self.table_ = self.table if self.table is not None else builtin_table()
        self.layout_ = make_layout(self.table_.attribute_order)
        self.model_, self.loss_curve_ = train(
            self._utterances(X, y), self.table_, self._config()
        )
        return self

    def predict(self, X):
        """Decode each feature matrix into its 35 attribute token sequences."""
        check_is_fitted(self, "model_")
        return [decode_all(self.model_.logits(f), self.layout_) for f in X]

    def score(self, X, y):
        """Mean attribute accuracy over the corpus, as a fraction in [0, 1]."""
        check_is_fitted(self, "model_")
        report = evaluate(self.model_, self._utterances(X, y), self.table_)
        return 1.0 - report.mean_error_rate / 100.0
