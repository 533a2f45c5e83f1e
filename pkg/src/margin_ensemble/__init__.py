"""Fine-grained ensembles: per-class confidences over a few base learners,
learned by maximizing a smoothed probability margin."""

from ._validation import InputError, NumericFloorWarning
from .data import EncodedDataset, gen_moons, load_csv, train_test_split
from .estimator import ConfidenceCombiner, MarginEnsembleClassifier
from .evaluation import EvalReport, accuracy, boundary_grid, margin_report
from .forest import ForestModel, TreeModel, import_stack, predict_stack, train_forest, train_tree
from .loss_grad import (
    HyperParams,
    LossBreakdown,
    batch_grad,
    batch_loss,
    finite_diff_grad,
    grad_entry_bound,
    lipschitz_bound,
    loss_from_probs,
    max2_exact,
    sample_grad,
    sample_loss,
    smooth_max2,
)
from .optimizer import TrainReport, init_theta, train
from .tensor_core import class_scores, ensemble_predict, one_hot, softmax

__version__ = "0.1.0"

__all__ = [
    "ConfidenceCombiner", "EncodedDataset", "EvalReport", "ForestModel", "HyperParams",
    "InputError", "LossBreakdown", "MarginEnsembleClassifier", "NumericFloorWarning",
    "TrainReport", "TreeModel", "accuracy", "batch_grad", "batch_loss", "boundary_grid",
    "class_scores", "ensemble_predict", "finite_diff_grad", "gen_moons", "grad_entry_bound",
    "import_stack", "init_theta", "lipschitz_bound", "load_csv", "loss_from_probs",
    "margin_report", "max2_exact", "one_hot", "predict_stack", "sample_grad", "sample_loss",
    "smooth_max2", "softmax", "train", "train_forest", "train_test_split", "train_tree",
]
