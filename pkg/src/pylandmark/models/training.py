import csv
import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from pylandmark.common import ConfigError, DataError
from pylandmark.evaluation import confusion, f1_voiced
from pylandmark.features.standardizer import Standardizer
from pylandmark.features.variants import FeatureVariant
from pylandmark.models.adam import AdamState, adam_step
from pylandmark.models.artifact import ModelArtifact, ModelFamily, TrainLogRow
from pylandmark.models.network import Network, bce_loss, default_cnn_config, default_mlp_config, nn_backward
from pylandmark.models.svm import default_gamma, svm_grid_search, svm_predict, svm_train

# Use package-level logger
logger = logging.getLogger("pylandmark")

MIN_SAMPLES_PER_CLASS = 20


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 200
    patience: int = 10
    dev_fraction: float = 0.10
    batch_size: int = 32
    seed: int = 0
    class_weighting: bool = True
    learning_rate: float = 1e-3
    svm_c: float = 1.0
    svm_gamma: float | None = None
    svm_class_weighting: bool = False
    grid_search: bool = False

    def __post_init__(self):
        if not 0.0 < self.dev_fraction < 0.5:
            raise ConfigError(f"dev_fraction must be in (0, 0.5), got {self.dev_fraction}")
        if self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if self.max_epochs < 1 or self.batch_size < 1:
            raise ConfigError("max_epochs and batch_size must be >= 1")

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()


def write_training_log(rows: list[TrainLogRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["epoch", "train_loss", "dev_loss", "dev_f1"])
        for r in rows:
            writer.writerow([r.epoch, repr(r.train_loss), repr(r.dev_loss), repr(r.dev_f1)])


def class_weights(labels) -> dict[int, float]:
    """w_c = N / (2 N_c) for c in {1 voiced, 0 unvoiced}"""
    labels = np.asarray(labels)
    n_voiced = int(np.sum(labels == 1))
    n_unvoiced = int(np.sum(labels == 0))
    if n_voiced == 0 or n_unvoiced == 0:
        raise DataError(f"class weights need both classes (voiced={n_voiced}, unvoiced={n_unvoiced})")
    total = n_voiced + n_unvoiced
    return {1: total / (2.0 * n_voiced), 0: total / (2.0 * n_unvoiced)}


def stratified_split(labels, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """(train indices, dev indices), round(fraction * n_c) of each class to dev"""
    labels = np.asarray(labels)
    train_parts, dev_parts = [], []
    for cls in sorted(np.unique(labels).tolist()):
        members = rng.permutation(np.flatnonzero(labels == cls))
        n_dev = int(round(fraction * len(members)))
        if n_dev == 0 or n_dev == len(members):
            raise DataError(f"dev split of {fraction:.0%} leaves class {cls} empty in train or dev ({len(members)} samples)")
        dev_parts.append(members[:n_dev])
        train_parts.append(members[n_dev:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(dev_parts))


class EarlyStopping:
    """Stop after `patience` consecutive epochs without a new dev-loss minimum"""

    def __init__(self, patience: int = 10):
        if patience < 1:
            raise ValueError(f"patience must be >= 1, got {patience}")
        self.patience = patience
        self.epoch = 0
        self.best_epoch = 0
        self.best_loss = float("inf")
        self.improved = False

    def step(self, loss: float) -> bool:
        """Record one epoch's dev loss; True when training should stop"""
        self.epoch += 1
        self.improved = loss < self.best_loss
        if self.improved:
            self.best_loss = loss
            self.best_epoch = self.epoch
        return self.epoch - self.best_epoch >= self.patience

    @property
    def should_stop(self) -> bool:
        return self.epoch - self.best_epoch >= self.patience


def _hinge(margins: np.ndarray, labels: np.ndarray) -> float:
    signed = np.where(labels == 1, 1.0, -1.0)
    return float(np.mean(np.maximum(0.0, 1.0 - signed * margins)))


def _train_svm(x_train, y_train, x_dev, y_dev, config: TrainConfig):
    weights = class_weights(y_train) if config.svm_class_weighting else None
    c, gamma = config.svm_c, config.svm_gamma
    if config.grid_search:
        c, gamma, _ = svm_grid_search(x_train, y_train, x_dev, y_dev, weights)
    if gamma is None:
        gamma = default_gamma(x_train)
    model = svm_train(x_train, y_train, c, gamma, weights)
    dev_pred, dev_margins = svm_predict(model, x_dev)
    _, train_margins = svm_predict(model, x_train)
    row = TrainLogRow(1, _hinge(train_margins, y_train), _hinge(dev_margins, y_dev), f1_voiced(confusion(dev_pred, y_dev)))
    return model, [row]


def _train_network(network: Network, x_train, y_train, x_dev, y_dev, config: TrainConfig, rng: np.random.Generator):
    weights = class_weights(y_train) if config.class_weighting else {1: 1.0, 0: 1.0}
    w_train = np.where(y_train == 1, weights[1], weights[0])
    w_dev = np.where(y_dev == 1, weights[1], weights[0])
    y_train_f = y_train.astype(np.float64)
    y_dev_f = y_dev.astype(np.float64)

    adam = AdamState(learning_rate=config.learning_rate)
    stopper = EarlyStopping(config.patience)
    best_state = network.get_state()
    log: list[TrainLogRow] = []
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(y_train))
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            grads = nn_backward(network, x_train[batch], y_train_f[batch], w_train[batch])
            adam_step(adam, [p for _, p in network.parameters()], grads)

        train_loss = bce_loss(network.forward(x_train), y_train_f, w_train)
        dev_logits = network.forward(x_dev)
        dev_loss = bce_loss(dev_logits, y_dev_f, w_dev)
        dev_f1 = f1_voiced(confusion((dev_logits >= 0).astype(np.int64), y_dev))
        log.append(TrainLogRow(epoch, train_loss, dev_loss, dev_f1))
        logger.debug(f"epoch {epoch}: train_loss={train_loss:.5f} dev_loss={dev_loss:.5f} dev_f1={dev_f1:.4f}")

        stop = stopper.step(dev_loss)
        if stopper.improved:
            best_state = network.get_state()
        if stop:
            break
    logger.info(f"Early stopping after epoch {stopper.epoch}; restoring epoch {stopper.best_epoch} (dev loss {stopper.best_loss:.5f})")
    network.set_state(best_state)
    return network, log, stopper.best_epoch


def train(
    family: ModelFamily,
    features: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig | None = None,
    variant: FeatureVariant = FeatureVariant.CUES,
    corpus_id: str = "",
) -> ModelArtifact:
    """Stratified dev split, standardize on the train part, fit, keep the best-dev parameters"""
    config = config or TrainConfig()
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels).astype(np.int64)
    if x.ndim != 2 or len(x) != len(y):
        raise DataError(f"feature matrix {x.shape} does not match {len(y)} labels")
    for cls, name in ((1, "voiced"), (0, "unvoiced")):
        count = int(np.sum(y == cls))
        if count < MIN_SAMPLES_PER_CLASS:
            raise DataError(f"need >= {MIN_SAMPLES_PER_CLASS} {name} samples to train, got {count}")

    rng = np.random.default_rng(config.seed)
    train_idx, dev_idx = stratified_split(y, config.dev_fraction, rng)
    standardizer = Standardizer.fit(x[train_idx])
    xs = standardizer.apply(x)
    x_train, y_train, x_dev, y_dev = xs[train_idx], y[train_idx], xs[dev_idx], y[dev_idx]
    logger.info(f"Training {family} on {variant} ({len(train_idx)} train / {len(dev_idx)} dev, dim {x.shape[1]})")

    best_epoch = 1
    if family is ModelFamily.SVM:
        model, log = _train_svm(x_train, y_train, x_dev, y_dev, config)
    else:
        net_config = default_cnn_config(x.shape[1]) if family is ModelFamily.CNN else default_mlp_config(x.shape[1])
        network = Network.build(net_config, rng)
        model, log, best_epoch = _train_network(network, x_train, y_train, x_dev, y_dev, config, rng)

    metadata = {
        "seed": config.seed,
        "config_hash": config.digest(),
        "train_config": asdict(config),
        "corpus_id": corpus_id,
        "n_train": int(len(train_idx)),
        "n_dev": int(len(dev_idx)),
        "best_epoch": best_epoch,
        "dev_f1": log[best_epoch - 1].dev_f1,
    }
    return ModelArtifact(family, variant, standardizer, model, metadata, log)
