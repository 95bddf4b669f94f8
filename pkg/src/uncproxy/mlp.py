"""Feedforward classifier with dropout, trained by SGD on soft labels.

The network is a plain fully-connected stack (ReLU hiddens, identity
logits) with inverted dropout: a Bernoulli(1-p) mask scaled by 1/(1-p)
is applied to the input of every layer, so the deterministic forward
pass is the expected network and needs no rescaling at test time.
Deterministic inference gives the point-estimate model; repeating the
stochastic forward pass with fresh masks gives MC-dropout inference.

All randomness (init, batch order, masks) is drawn from the documented
streams in :mod:`uncproxy.rng`, so training and prediction are pure
functions of their inputs and seeds.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DataFormatError, InvalidInputError, TrainingDivergedError
from .uncertainty import McPrediction

ACTIVATIONS = ("relu", "identity")

PROB_FLOOR = 1e-12  # clip inside logs so 0·log 0 stays finite

PARAMS_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Layer:
    """One fully-connected layer: ``out = act(in @ weights + bias)``."""

    weights: np.ndarray  # (in_dim, out_dim)
    bias: np.ndarray     # (out_dim,)
    activation: str

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        if weights.ndim != 2:
            raise InvalidInputError("layer weights must be 2-D")
        if bias.shape != (weights.shape[1],):
            raise InvalidInputError("bias length must equal the layer's out-dim")
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
            raise InvalidInputError("layer parameters must be finite")
        if self.activation not in ACTIVATIONS:
            raise InvalidInputError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def in_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class NetworkParams:
    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise InvalidInputError("network needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.out_dim != nxt.in_dim:
                raise InvalidInputError(
                    f"layer dims do not chain: {prev.out_dim} -> {nxt.in_dim}"
                )
        if layers[-1].activation != "identity":
            raise InvalidInputError("final layer must be identity (logits)")
        object.__setattr__(self, "layers", layers)

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim


@dataclass(frozen=True)
class TrainConfig:
    dropout_p: float = 0.5
    learning_rate: float = 0.05
    epochs: int = 30
    batch_size: int = 64
    weight_decay: float | None = None  # None -> (1 - dropout_p) / (2 N)
    seed: int = 0
    mc_samples_t: int = 30

    def __post_init__(self):
        if not 0.0 < self.dropout_p < 1.0:
            raise InvalidInputError("dropout_p must lie in (0, 1)")
        if self.learning_rate <= 0.0:
            raise InvalidInputError("learning_rate must be positive")
        if self.epochs < 0 or self.batch_size < 1 or self.mc_samples_t < 1:
            raise InvalidInputError("epochs >= 0, batch_size >= 1, mc_samples_t >= 1 required")
        if self.weight_decay is not None and self.weight_decay < 0.0:
            raise InvalidInputError("weight_decay must be non-negative")

    def resolve_weight_decay(self, n_samples: int) -> float:
        """Effective decay coefficient; the default scales with dataset size."""
        if self.weight_decay is not None:
            return self.weight_decay
        return (1.0 - self.dropout_p) / (2.0 * n_samples)


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray     # (N, D)
    soft_labels: np.ndarray  # (N, C), rows on the simplex
    sample_ids: tuple[str, ...]

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.soft_labels, dtype=np.float64)
        if features.ndim != 2 or labels.ndim != 2:
            raise InvalidInputError("features and soft_labels must be 2-D")
        n = features.shape[0]
        if n == 0 or features.shape[1] == 0 or labels.shape[1] == 0:
            raise InvalidInputError("dataset dimensions must be positive")
        if labels.shape[0] != n or len(self.sample_ids) != n:
            raise InvalidInputError("features, soft_labels, and sample_ids must align")
        if not np.all(np.isfinite(features)):
            raise InvalidInputError("features must be finite")
        if np.any(labels < 0) or np.any(np.abs(labels.sum(axis=1) - 1.0) > 1e-9):
            raise InvalidInputError("each soft-label row must be a probability vector")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "soft_labels", labels)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class TrainResult:
    params: NetworkParams
    loss_trace: tuple[float, ...]  # mean stochastic batch loss per epoch


def softmax(logits) -> np.ndarray:
    """Stable softmax over the last axis (max-shifted before exp)."""
    z = np.asarray(logits, dtype=np.float64)
    if z.size == 0:
        raise InvalidInputError("softmax needs at least one logit")
    if not np.all(np.isfinite(z)):
        raise InvalidInputError("softmax input must be finite")
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def init_params(layer_sizes, seed: int) -> NetworkParams:
    """Gaussian init with per-layer std sqrt(2 / fan_in); zero biases."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise InvalidInputError("layer_sizes needs >= 2 positive entries")
    layers = []
    for idx, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        g = rng.stream(seed, rng.WEIGHT_INIT, idx)
        weights = g.standard_normal((fan_in, fan_out)) * np.sqrt(2.0 / fan_in)
        activation = "identity" if idx == len(sizes) - 2 else "relu"
        layers.append(Layer(weights=weights, bias=np.zeros(fan_out), activation=activation))
    return NetworkParams(layers=tuple(layers))


def sample_dropout_masks(
    params: NetworkParams,
    p: float,
    seed: int,
    purpose: int = rng.PREDICT_MASKS,
    i: int = 0,
    j: int = 0,
) -> tuple[np.ndarray, ...]:
    """Draw one Bernoulli(1-p) keep-mask per layer input.

    Mask ``l`` comes from the ``(seed, purpose, l, i, j)`` stream, so
    masks are reproducible per layer and per (pass, sample) coordinate.
    """
    if not 0.0 < p < 1.0:
        raise InvalidInputError("dropout probability must lie in (0, 1)")
    masks = []
    for idx, layer in enumerate(params.layers):
        g = rng.stream(seed, purpose, idx, i, j)
        masks.append((g.random(layer.in_dim) < (1.0 - p)).astype(np.float64))
    return tuple(masks)


def _run_layers(params: NetworkParams, x: np.ndarray, masks, dropout_p):
    """Shared forward walk; returns (layer inputs as fed, pre-activations).

    ``masks`` entries may be 1-D (shared across the batch) or (B, in_dim)
    matrices (one mask row per batch row, used for pass-batched MC).
    """
    scale = 1.0 / (1.0 - dropout_p) if masks is not None else 1.0
    a = x
    inputs, pre_acts = [], []
    for idx, layer in enumerate(params.layers):
        if masks is not None:
            a = a * (masks[idx] * scale)
        inputs.append(a)
        z = a @ layer.weights + layer.bias
        pre_acts.append(z)
        a = np.maximum(z, 0.0) if layer.activation == "relu" else z
    return inputs, pre_acts


def forward(
    params: NetworkParams,
    x,
    masks=None,
    dropout_p: float | None = None,
) -> np.ndarray:
    """Logits for one feature vector or a (B, D) batch.

    Deterministic mode (``masks=None``) applies no dropout. Stochastic
    mode applies the given per-layer masks with 1/(1-p) scaling to each
    layer's input; ``dropout_p`` must then be supplied.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != params.in_dim:
        raise InvalidInputError(
            f"input dim {x.shape[-1] if x.ndim else '?'} does not match network in-dim {params.in_dim}"
        )
    if masks is not None:
        if dropout_p is None or not 0.0 < dropout_p < 1.0:
            raise InvalidInputError("stochastic forward needs dropout_p in (0, 1)")
        if len(masks) != len(params.layers):
            raise InvalidInputError("need exactly one mask per layer")
    _, pre_acts = _run_layers(params, x, masks, dropout_p)
    logits = pre_acts[-1]
    return logits[0] if single else logits


def loss(
    params: NetworkParams,
    features,
    soft_labels,
    config: TrainConfig,
    masks=None,
) -> float:
    """Mean soft-label cross-entropy plus weight decay.

    Cross-entropy uses natural log with predictions clipped at 1e-12.
    The decay term is ``weight_decay * sum(W^2 + b^2)``; when the config
    leaves ``weight_decay`` unset it defaults from the given batch size.
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    labels = np.atleast_2d(np.asarray(soft_labels, dtype=np.float64))
    if features.shape[0] == 0:
        raise InvalidInputError("loss needs a non-empty batch")
    if labels.shape != (features.shape[0], params.out_dim):
        raise InvalidInputError("soft_labels shape must be (batch, n_classes)")
    logits = forward(params, features, masks=masks, dropout_p=config.dropout_p if masks is not None else None)
    probs = np.clip(softmax(logits), PROB_FLOOR, None)
    ce = float(-np.mean(np.sum(labels * np.log(probs), axis=1)))
    decay = config.resolve_weight_decay(features.shape[0])
    reg = decay * sum(
        float(np.sum(l.weights * l.weights) + np.sum(l.bias * l.bias)) for l in params.layers
    )
    return ce + reg


def gradients(
    params: NetworkParams,
    features,
    soft_labels,
    config: TrainConfig,
    masks=None,
    weight_decay: float | None = None,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Analytic (dW, db) of :func:`loss` per layer, via backprop.

    ``weight_decay`` overrides the config's resolution rule (train()
    resolves the default once against the full dataset size).
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    labels = np.atleast_2d(np.asarray(soft_labels, dtype=np.float64))
    batch = features.shape[0]
    if batch == 0:
        raise InvalidInputError("gradients need a non-empty batch")
    decay = weight_decay if weight_decay is not None else config.resolve_weight_decay(batch)
    scale = 1.0 / (1.0 - config.dropout_p) if masks is not None else 1.0

    inputs, pre_acts = _run_layers(params, features, masks, config.dropout_p)
    delta = (softmax(pre_acts[-1]) - labels) / batch

    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(params.layers)
    for idx in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[idx]
        dw = inputs[idx].T @ delta + 2.0 * decay * layer.weights
        db = delta.sum(axis=0) + 2.0 * decay * layer.bias
        grads[idx] = (dw, db)
        if idx > 0:
            upstream = delta @ layer.weights.T
            if masks is not None:
                upstream = upstream * (masks[idx] * scale)
            delta = upstream * (pre_acts[idx - 1] > 0.0)
    return grads


def train(dataset: Dataset, config: TrainConfig, hidden_sizes) -> TrainResult:
    """Mini-batch SGD with a fresh dropout mask per batch.

    Deterministic for a given seed: init, epoch shuffles, and masks all
    come from fixed streams. Raises :class:`TrainingDivergedError` the
    first time a batch loss goes non-finite.
    """
    n = dataset.n_samples
    layer_sizes = [dataset.features.shape[1], *[int(h) for h in hidden_sizes], dataset.soft_labels.shape[1]]
    params = init_params(layer_sizes, config.seed)
    decay = config.resolve_weight_decay(n)
    cfg = dataclasses.replace(config, weight_decay=decay)

    trace: list[float] = []
    for epoch in range(cfg.epochs):
        order = rng.stream(cfg.seed, rng.BATCH_SHUFFLE, epoch).permutation(n)
        batch_losses = []
        for batch_idx, start in enumerate(range(0, n, cfg.batch_size)):
            take = order[start : start + cfg.batch_size]
            xb = dataset.features[take]
            yb = dataset.soft_labels[take]
            masks = sample_dropout_masks(
                params, cfg.dropout_p, cfg.seed, purpose=rng.TRAIN_MASKS, i=epoch, j=batch_idx
            )
            try:
                with np.errstate(over="ignore", invalid="ignore"):
                    batch_loss = loss(params, xb, yb, cfg, masks=masks)
            except InvalidInputError:
                # forward overflowed into non-finite logits
                raise TrainingDivergedError(epoch) from None
            if not np.isfinite(batch_loss):
                raise TrainingDivergedError(epoch)
            batch_losses.append(batch_loss)
            grads = gradients(params, xb, yb, cfg, masks=masks)
            stepped = [
                (layer.weights - cfg.learning_rate * dw, layer.bias - cfg.learning_rate * db)
                for layer, (dw, db) in zip(params.layers, grads)
            ]
            if any(
                not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))) for w, b in stepped
            ):
                raise TrainingDivergedError(epoch)
            params = NetworkParams(
                layers=tuple(
                    Layer(weights=w, bias=b, activation=layer.activation)
                    for layer, (w, b) in zip(params.layers, stepped)
                )
            )
        epoch_loss = float(np.mean(batch_losses))
        if not np.isfinite(epoch_loss):
            raise TrainingDivergedError(epoch)
        trace.append(epoch_loss)
    return TrainResult(params=params, loss_trace=tuple(trace))


def mc_predict(
    params: NetworkParams,
    x,
    t: int,
    dropout_p: float,
    seed: int,
    sample_index: int = 0,
    sample_id: str | None = None,
) -> McPrediction:
    """T stochastic softmax rows for one sample plus their mean.

    Pass ``t`` draws its masks from the ``(seed, PREDICT_MASKS, layer,
    t, sample_index)`` streams, so passes are independent and the result
    does not depend on evaluation order.
    """
    if t < 1:
        raise InvalidInputError("mc_predict needs t >= 1")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != params.in_dim:
        raise InvalidInputError("x must be a feature vector matching the network in-dim")
    per_layer = [
        np.empty((t, layer.in_dim), dtype=np.float64) for layer in params.layers
    ]
    for pass_idx in range(t):
        masks = sample_dropout_masks(
            params, dropout_p, seed, purpose=rng.PREDICT_MASKS, i=pass_idx, j=sample_index
        )
        for layer_idx, mask in enumerate(masks):
            per_layer[layer_idx][pass_idx] = mask
    tiled = np.broadcast_to(x, (t, x.shape[0]))
    logits = forward(params, tiled, masks=per_layer, dropout_p=dropout_p)
    probs = softmax(logits)
    return McPrediction.from_probs(sample_id if sample_id is not None else str(sample_index), probs)


def params_to_json(params: NetworkParams) -> str:
    """Serialize to the versioned JSON layer-list format."""
    doc = {
        "version": PARAMS_FORMAT_VERSION,
        "layers": [
            {
                "rows": layer.in_dim,
                "cols": layer.out_dim,
                "weights": layer.weights.reshape(-1).tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation,
            }
            for layer in params.layers
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def params_from_json(text: str) -> NetworkParams:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"params document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != PARAMS_FORMAT_VERSION:
        raise DataFormatError(
            f"unsupported params document version: {doc.get('version') if isinstance(doc, dict) else doc!r}"
        )
    layers = []
    for entry in doc.get("layers", []):
        try:
            rows, cols = int(entry["rows"]), int(entry["cols"])
            weights = np.asarray(entry["weights"], dtype=np.float64)
            bias = np.asarray(entry["bias"], dtype=np.float64)
            activation = entry["activation"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed layer entry: {exc}") from exc
        if weights.size != rows * cols:
            raise DataFormatError(
                f"layer declares {rows}x{cols} but carries {weights.size} weights"
            )
        layers.append(
            Layer(weights=weights.reshape(rows, cols), bias=bias, activation=activation)
        )
    if not layers:
        raise DataFormatError("params document has no layers")
    return NetworkParams(layers=tuple(layers))
