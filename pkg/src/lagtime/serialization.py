"""Versioned JSON persistence for fitted models.

Every supported object maps to a document ``{"format": "lagtime",
"format_version": 1, "type": <registered name>, "payload": {...}}``.
Matrices are stored row-major as ``{"dtype", "shape", "data"}`` with flat
number lists; floats serialize via their shortest round-trip representation,
so numeric payloads survive a save/load cycle bit-exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable

import numpy as np
from numpy.typing import NDArray

from . import basis, clustering, covariance, decomposition, hmm, kernels
from . import markov, numerics, sindy
from .errors import InvalidArgument

__all__ = [
    "FORMAT_NAME",
    "FORMAT_VERSION",
    "encode_array",
    "decode_array",
    "to_document",
    "from_document",
    "save_model",
    "load_model",
]

FORMAT_NAME = "lagtime"
FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Arrays
# ---------------------------------------------------------------------------


def encode_array(a: NDArray) -> dict:
    """Encode an array as dtype + shape + flat row-major data."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return {
            "dtype": str(a.dtype),
            "shape": list(a.shape),
            "real": np.real(a).ravel().tolist(),
            "imag": np.imag(a).ravel().tolist(),
        }
    if a.dtype.kind not in "fiub":
        raise InvalidArgument(f"cannot encode arrays of dtype {a.dtype}")
    return {
        "dtype": str(a.dtype),
        "shape": list(a.shape),
        "data": a.ravel().tolist(),
    }


def decode_array(doc: dict) -> NDArray:
    dtype = np.dtype(doc["dtype"])
    shape = tuple(doc["shape"])
    if dtype.kind == "c":
        real = np.array(doc["real"], dtype=np.float64)
        imag = np.array(doc["imag"], dtype=np.float64)
        return (real + 1j * imag).astype(dtype).reshape(shape)
    return np.array(doc["data"], dtype=dtype).reshape(shape)


def _maybe_array(a) -> Any:
    return None if a is None else encode_array(a)


def _maybe_decode(doc) -> Any:
    return None if doc is None else decode_array(doc)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


def _encode_kernel(k: kernels.Kernel) -> dict:
    if isinstance(k, kernels.GaussianKernel):
        return {"kind": "gaussian", "sigma": k.sigma}
    if isinstance(k, kernels.PolynomialKernel):
        return {"kind": "polynomial", "degree": k.degree, "constant": k.constant}
    raise InvalidArgument(f"cannot serialize kernel of type {type(k).__name__}")


def _decode_kernel(doc: dict) -> kernels.Kernel:
    kind = doc["kind"]
    if kind == "gaussian":
        return kernels.GaussianKernel(sigma=doc["sigma"])
    if kind == "polynomial":
        return kernels.PolynomialKernel(degree=doc["degree"], constant=doc["constant"])
    raise InvalidArgument(f"unknown kernel kind {kind!r}")


# ---------------------------------------------------------------------------
# Feature maps
# ---------------------------------------------------------------------------


def _encode_feature(f: basis.FeatureMap) -> dict:
    if isinstance(f, basis.IdentityFeatures):
        return {"kind": "identity", "dim": f.dimension_in}
    if isinstance(f, basis.MonomialFeatures):
        return {"kind": "monomial", "dim": f.dimension_in, "max_degree": f.max_degree}
    if isinstance(f, basis.IndicatorFeatures):
        return {"kind": "indicator", "n_states": f.dimension_out}
    if isinstance(f, basis.RandomFeatureNet):
        return {
            "kind": "random_net",
            "dim_in": f.dimension_in,
            "n_hidden": f.n_hidden,
            "n_out": f.dimension_out,
            "seed": f.seed,
            "W1": encode_array(f.W1),
            "b1": encode_array(f.b1),
            "W2": encode_array(f.W2),
            "b2": encode_array(f.b2),
        }
    if isinstance(f, basis.CylinderEmbedding):
        return {"kind": "cylinder", "period": f.period, "y_scale": f.y_scale}
    if isinstance(f, basis.Whitener):
        w = f.whitening
        return {
            "kind": "whitener",
            "transform": encode_array(w.transform),
            "mean": encode_array(w.mean),
            "rank": int(w.rank),
        }
    if isinstance(f, basis.LinearFeatures):
        return {
            "kind": "linear",
            "weights": encode_array(f.weights),
            "offset": _maybe_array(f.offset),
        }
    if isinstance(f, basis.WithConstant):
        return {"kind": "with_constant", "inner": _encode_feature(f.inner)}
    if isinstance(f, basis.ChainedFeatures):
        return {
            "kind": "chained",
            "first": _encode_feature(f.first),
            "second": _encode_feature(f.second),
        }
    if isinstance(f, kernels.KernelSectionFeatures):
        return {
            "kind": "kernel_sections",
            "kernel": _encode_kernel(f.kernel),
            "points": encode_array(f.points),
            "centered": f.centered,
        }
    raise InvalidArgument(f"cannot serialize feature map of type {type(f).__name__}")


def _decode_feature(doc: dict) -> basis.FeatureMap:
    kind = doc["kind"]
    if kind == "identity":
        return basis.IdentityFeatures(doc["dim"])
    if kind == "monomial":
        return basis.MonomialFeatures(doc["dim"], doc["max_degree"])
    if kind == "indicator":
        return basis.IndicatorFeatures(doc["n_states"])
    if kind == "random_net":
        net = basis.RandomFeatureNet(
            doc["dim_in"], doc["n_hidden"], doc["n_out"], seed=doc["seed"]
        )
        net.W1 = decode_array(doc["W1"])
        net.b1 = decode_array(doc["b1"])
        net.W2 = decode_array(doc["W2"])
        net.b2 = decode_array(doc["b2"])
        return net
    if kind == "cylinder":
        return basis.CylinderEmbedding(period=doc["period"], y_scale=doc["y_scale"])
    if kind == "whitener":
        transform = decode_array(doc["transform"])
        return basis.Whitener(numerics.WhiteningTransform(
            transform=transform,
            mean=decode_array(doc["mean"]),
            rank=doc["rank"],
        ))
    if kind == "linear":
        return basis.LinearFeatures(
            decode_array(doc["weights"]), offset=_maybe_decode(doc["offset"])
        )
    if kind == "with_constant":
        return basis.WithConstant(_decode_feature(doc["inner"]))
    if kind == "chained":
        return basis.ChainedFeatures(
            _decode_feature(doc["first"]), _decode_feature(doc["second"])
        )
    if kind == "kernel_sections":
        return kernels.KernelSectionFeatures(
            _decode_kernel(doc["kernel"]),
            decode_array(doc["points"]),
            centered=doc["centered"],
        )
    raise InvalidArgument(f"unknown feature map kind {kind!r}")


# ---------------------------------------------------------------------------
# Model payload codecs
# ---------------------------------------------------------------------------


def _encode_covariance(m: covariance.CovarianceModel) -> dict:
    return {
        "mean_0": encode_array(m.mean_0),
        "mean_t": encode_array(m.mean_t),
        "c00": encode_array(m.c00),
        "c0t": encode_array(m.c0t),
        "ctt": encode_array(m.ctt),
        "n_pairs": int(m.n_pairs),
        "lag": int(m.lag),
        "symmetrized": bool(m.symmetrized),
        "mean_removed": bool(m.mean_removed),
    }


def _decode_covariance(doc: dict) -> covariance.CovarianceModel:
    return covariance.CovarianceModel(
        mean_0=decode_array(doc["mean_0"]),
        mean_t=decode_array(doc["mean_t"]),
        c00=decode_array(doc["c00"]),
        c0t=decode_array(doc["c0t"]),
        ctt=decode_array(doc["ctt"]),
        n_pairs=doc["n_pairs"],
        lag=doc["lag"],
        symmetrized=doc["symmetrized"],
        mean_removed=doc["mean_removed"],
    )


def _encode_transfer_operator(m: decomposition.TransferOperatorModel) -> dict:
    return {
        "f": _encode_feature(m.f),
        "g": _encode_feature(m.g),
        "K": encode_array(m.K),
        "method": m.method,
        "eigenvalues": _maybe_array(m.eigenvalues),
        "projection_matrix": _maybe_array(m.projection_matrix),
    }


def _decode_transfer_operator(doc: dict) -> decomposition.TransferOperatorModel:
    return decomposition.TransferOperatorModel(
        f=_decode_feature(doc["f"]),
        g=_decode_feature(doc["g"]),
        K=decode_array(doc["K"]),
        method=doc["method"],
        eigenvalues=_maybe_decode(doc["eigenvalues"]),
        projection_matrix=_maybe_decode(doc["projection_matrix"]),
    )


def _encode_koopman(m: decomposition.CovarianceKoopmanModel) -> dict:
    return {
        "U": encode_array(m.U),
        "V": encode_array(m.V),
        "sigma": encode_array(m.sigma),
        "covariances": _encode_covariance(m.covariances),
        "chi0": _encode_feature(m.chi0),
        "chi1": _encode_feature(m.chi1),
        "method": m.method,
    }


def _decode_koopman(doc: dict) -> decomposition.CovarianceKoopmanModel:
    return decomposition.CovarianceKoopmanModel(
        U=decode_array(doc["U"]),
        V=decode_array(doc["V"]),
        sigma=decode_array(doc["sigma"]),
        covariances=_decode_covariance(doc["covariances"]),
        chi0=_decode_feature(doc["chi0"]),
        chi1=_decode_feature(doc["chi1"]),
        method=doc["method"],
    )


def _encode_kvad(m: decomposition.KVADModel) -> dict:
    return {
        "f": _encode_feature(m.f),
        "q_weights": encode_array(m.q_weights),
        "K": encode_array(m.K),
        "kernel": _encode_kernel(m.kernel),
        "y_train": encode_array(m.y_train),
        "score": m.score,
        "feature_mean": encode_array(m.feature_mean),
        "projection_matrix": encode_array(m.projection_matrix),
        "singular_values": encode_array(m.singular_values),
    }


def _decode_kvad(doc: dict) -> decomposition.KVADModel:
    return decomposition.KVADModel(
        f=_decode_feature(doc["f"]),
        q_weights=decode_array(doc["q_weights"]),
        K=decode_array(doc["K"]),
        kernel=_decode_kernel(doc["kernel"]),
        y_train=decode_array(doc["y_train"]),
        score=doc["score"],
        feature_mean=decode_array(doc["feature_mean"]),
        projection_matrix=decode_array(doc["projection_matrix"]),
        singular_values=decode_array(doc["singular_values"]),
    )


def _encode_counts(m: markov.TransitionCountModel) -> dict:
    return {
        "count_matrix": encode_array(m.count_matrix),
        "lag": int(m.lag),
        "counting_mode": m.counting_mode,
        "state_symbols": encode_array(m.state_symbols),
    }


def _decode_counts(doc: dict) -> markov.TransitionCountModel:
    return markov.TransitionCountModel(
        count_matrix=decode_array(doc["count_matrix"]),
        lag=doc["lag"],
        counting_mode=doc["counting_mode"],
        state_symbols=decode_array(doc["state_symbols"]),
    )


def _encode_msm(m: markov.MarkovStateModel) -> dict:
    return {
        "transition_matrix": encode_array(m.transition_matrix),
        "lag": int(m.lag),
        "reversible": bool(m.reversible),
        "count_model": None if m.count_model is None else _encode_counts(m.count_model),
    }


def _decode_msm(doc: dict) -> markov.MarkovStateModel:
    counts = doc["count_model"]
    return markov.MarkovStateModel(
        transition_matrix=decode_array(doc["transition_matrix"]),
        lag=doc["lag"],
        reversible=doc["reversible"],
        count_model=None if counts is None else _decode_counts(counts),
    )


def _encode_output_model(m: hmm.OutputModel) -> dict:
    if isinstance(m, hmm.DiscreteOutputModel):
        return {"kind": "discrete", "emission_matrix": encode_array(m.emission_matrix)}
    if isinstance(m, hmm.GaussianOutputModel):
        return {
            "kind": "gaussian",
            "means": encode_array(m.means),
            "stds": encode_array(m.stds),
        }
    raise InvalidArgument(f"cannot serialize output model of type {type(m).__name__}")


def _decode_output_model(doc: dict) -> hmm.OutputModel:
    if doc["kind"] == "discrete":
        return hmm.DiscreteOutputModel(decode_array(doc["emission_matrix"]))
    if doc["kind"] == "gaussian":
        return hmm.GaussianOutputModel(decode_array(doc["means"]), decode_array(doc["stds"]))
    raise InvalidArgument(f"unknown output model kind {doc['kind']!r}")


def _encode_hmm(m: hmm.HiddenMarkovModel) -> dict:
    return {
        "transition_model": _encode_msm(m.transition_model),
        "output_model": _encode_output_model(m.output_model),
        "initial_distribution": encode_array(m.initial_distribution),
    }


def _decode_hmm(doc: dict) -> hmm.HiddenMarkovModel:
    return hmm.HiddenMarkovModel(
        transition_model=_decode_msm(doc["transition_model"]),
        output_model=_decode_output_model(doc["output_model"]),
        initial_distribution=decode_array(doc["initial_distribution"]),
    )


def _encode_clustering(m: clustering.ClusteringModel) -> dict:
    return {
        "centers": encode_array(m.centers),
        "inertia": m.inertia,
        "n_iterations": int(m.n_iterations),
        "converged": bool(m.converged),
    }


def _decode_clustering(doc: dict) -> clustering.ClusteringModel:
    return clustering.ClusteringModel(
        centers=decode_array(doc["centers"]),
        inertia=doc["inertia"],
        n_iterations=doc["n_iterations"],
        converged=doc["converged"],
    )


def _encode_sindy(m: sindy.SINDyModel) -> dict:
    return {
        "xi": encode_array(m.xi),
        "library": _encode_feature(m.library),
        "discrete_time": bool(m.discrete_time),
        "emptied_dimensions": encode_array(m.emptied_dimensions),
        "variable_names": None if m.variable_names is None else list(m.variable_names),
    }


def _decode_sindy(doc: dict) -> sindy.SINDyModel:
    return sindy.SINDyModel(
        xi=decode_array(doc["xi"]),
        library=_decode_feature(doc["library"]),
        discrete_time=doc["discrete_time"],
        emptied_dimensions=decode_array(doc["emptied_dimensions"]),
        variable_names=doc["variable_names"],
    )


_CODECS: dict[str, tuple[type, Callable, Callable]] = {
    "covariance_model": (covariance.CovarianceModel, _encode_covariance, _decode_covariance),
    "transfer_operator_model": (
        decomposition.TransferOperatorModel,
        _encode_transfer_operator,
        _decode_transfer_operator,
    ),
    "covariance_koopman_model": (
        decomposition.CovarianceKoopmanModel, _encode_koopman, _decode_koopman,
    ),
    "kvad_model": (decomposition.KVADModel, _encode_kvad, _decode_kvad),
    "transition_count_model": (markov.TransitionCountModel, _encode_counts, _decode_counts),
    "markov_state_model": (markov.MarkovStateModel, _encode_msm, _decode_msm),
    "hidden_markov_model": (hmm.HiddenMarkovModel, _encode_hmm, _decode_hmm),
    "clustering_model": (clustering.ClusteringModel, _encode_clustering, _decode_clustering),
    "sindy_model": (sindy.SINDyModel, _encode_sindy, _decode_sindy),
}


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def to_document(model) -> dict:
    """Build the versioned JSON document for a supported model object."""
    for name, (cls, encode, _) in _CODECS.items():
        if type(model) is cls:
            return {
                "format": FORMAT_NAME,
                "format_version": FORMAT_VERSION,
                "type": name,
                "payload": encode(model),
            }
    raise InvalidArgument(f"no serializer registered for {type(model).__name__}")


def from_document(doc: dict):
    """Rebuild a model object from its JSON document."""
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise InvalidArgument("not a lagtime model document")
    version = doc.get("format_version")
    if not isinstance(version, int) or version < 1 or version > FORMAT_VERSION:
        raise InvalidArgument(f"unsupported format version {version!r}")
    name = doc.get("type")
    if name not in _CODECS:
        raise InvalidArgument(f"unknown model type {name!r}")
    return _CODECS[name][2](doc["payload"])


def save_model(model, path) -> None:
    """Serialize a model to a JSON file."""
    Path(path).write_text(json.dumps(to_document(model)) + "\n")


def load_model(path):
    """Load a model previously written by :func:`save_model`."""
    return from_document(json.loads(Path(path).read_text()))
