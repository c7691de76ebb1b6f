"""Numerical core: LSTM kernels, Q-networks, optimisers, checkpoints."""
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .fit import GradReport, grad_check, mse_fit, mse_loss_grad, random_check_case
from .kernels import BACKEND
from .network import (
    DenseQNet,
    QNet,
    RecurrentQNet,
    SeqBatch,
    ShapeError,
    TabularQNet,
    encode,
    from_meta,
    lstm_final_hidden,
    make_batch,
)
from .optim import Adam, Sgd, make_optimizer

__all__ = [
    "BACKEND",
    "Adam",
    "CheckpointError",
    "DenseQNet",
    "GradReport",
    "QNet",
    "RecurrentQNet",
    "SeqBatch",
    "Sgd",
    "ShapeError",
    "TabularQNet",
    "encode",
    "from_meta",
    "grad_check",
    "load_checkpoint",
    "lstm_final_hidden",
    "make_batch",
    "make_optimizer",
    "mse_fit",
    "mse_loss_grad",
    "random_check_case",
    "save_checkpoint",
]
