"""Uncertainty decomposition, annotator disagreement, and calibration metrics.

Core surface:

* :mod:`uncproxy.mlp`          - dropout MLP, SGD training, MC-dropout inference
* :mod:`uncproxy.uncertainty`  - total / aleatoric / epistemic decomposition
* :mod:`uncproxy.annotations`  - soft labels and disagreement from vote counts
* :mod:`uncproxy.calibration`  - reliability diagrams, BCE/ECE/MCE/SCE/ACE/TACE
* :mod:`uncproxy.evaluation`   - JSD, Pearson/t tests, accuracy, rejection
* :mod:`uncproxy.synth`        - Gaussian-mixture data with known posteriors
* :mod:`uncproxy.pipeline`     - file formats and the synth/train/predict/analyze flow
"""

__version__ = "0.1.0"

from .uncertainty import McPrediction, UncertaintyTriple, decompose  # noqa: E402,F401
from .annotations import LabelSchema, SoftLabel, disagreement  # noqa: E402,F401
