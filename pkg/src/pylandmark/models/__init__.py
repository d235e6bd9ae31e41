from .adam import AdamState, adam_step
from .artifact import ModelArtifact, ModelFamily, TrainLogRow, load_model, save_model
from .network import CnnConfig, ConvBlock, Network, bce_loss, default_cnn_config, default_mlp_config, nn_backward, nn_forward
from .svm import SvmModel, svm_grid_search, svm_predict, svm_train
from .training import EarlyStopping, TrainConfig, class_weights, stratified_split, train, write_training_log

__all__ = [
    "AdamState",
    "adam_step",
    "ModelArtifact",
    "ModelFamily",
    "TrainLogRow",
    "load_model",
    "save_model",
    "CnnConfig",
    "ConvBlock",
    "Network",
    "bce_loss",
    "default_cnn_config",
    "default_mlp_config",
    "nn_backward",
    "nn_forward",
    "SvmModel",
    "svm_grid_search",
    "svm_predict",
    "svm_train",
    "EarlyStopping",
    "TrainConfig",
    "class_weights",
    "stratified_split",
    "train",
    "write_training_log",
]
