"""MLP and ANFIS surrogate models, training and metrics."""

from .anfis import AnfisSystem, anfis_forward, anfis_loss, anfis_train, bell_membership, gaussian_membership
from .data import Dataset, MinMaxScaler, split_rows
from .metrics import chi_squared, mse, per_row_metric
from .mlp import ACTIVATIONS, MlpNetwork, TrainConfig, mlp_forward, mlp_loss, mlp_train_gd
from .model import Surrogate, SurrogateSpec, fit_surrogate
from .selection import model_select_mlp
from .serialize import load_surrogate, save_surrogate, surrogate_from_dict, surrogate_to_dict

__all__ = [
    "ACTIVATIONS", "AnfisSystem", "Dataset", "MinMaxScaler", "MlpNetwork", "Surrogate", "SurrogateSpec",
    "TrainConfig", "anfis_forward", "anfis_loss", "anfis_train", "bell_membership", "chi_squared",
    "fit_surrogate", "gaussian_membership", "load_surrogate", "mlp_forward", "mlp_loss", "mlp_train_gd",
    "model_select_mlp", "mse", "per_row_metric", "save_surrogate", "split_rows", "surrogate_from_dict",
    "surrogate_to_dict",
]
