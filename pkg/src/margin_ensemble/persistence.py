"""JSON model files."""

import json
from dataclasses import dataclass

import numpy as np

from ._validation import InputError, check_theta
from .forest import ForestModel
from .loss_grad import HyperParams

FORMAT_VERSION = "margin-ensemble/1"


@dataclass
class ModelFile:
    theta: np.ndarray
    label_dict: dict
    hyperparams: HyperParams
    seed: int
    forest: ForestModel = None

    def to_dict(self):
        return {
            "version": FORMAT_VERSION,
            "seed": int(self.seed),
            "hyperparams": self.hyperparams.to_dict(),
            "label_dict": dict(self.label_dict),
            "theta": [[float(v) for v in row] for row in np.asarray(self.theta)],
            "forest": None if self.forest is None else self.forest.to_dict(),
        }

    @classmethod
    def from_dict(cls, record):
        if record.get("version") != FORMAT_VERSION:
            raise InputError(f"unsupported model version {record.get('version')!r}")
        try:
            theta = check_theta(np.array(record["theta"], dtype=np.float64))
            label_dict = {str(k): int(v) for k, v in record["label_dict"].items()}
            forest = record.get("forest")
            model = cls(
                theta=theta,
                label_dict=label_dict,
                hyperparams=HyperParams(**record["hyperparams"]),
                seed=int(record["seed"]),
                forest=None if forest is None else ForestModel.from_dict(forest),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed model file: {exc}") from exc
        if theta.shape[0] != len(label_dict):
            raise InputError("theta rows do not match the label dictionary")
        if model.forest is not None and model.forest.k != theta.shape[1]:
            raise InputError("theta columns do not match the number of trees")
        return model


def save_model(model, path):
    text = json.dumps(model.to_dict(), indent=1, allow_nan=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc
    return ModelFile.from_dict(record)
