"""Network checkpoints.

A checkpoint is one UTF-8 JSON header line (architecture, activations,
seed, parameter count) followed by the parameters as a flat block of
little-endian float64 values in :meth:`NetworkSpec.parameters` order.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np

from manifoldlab.exceptions import InvalidParameterError, ShapeError
from manifoldlab.neural.layers import layer_from_header, parameter_shapes
from manifoldlab.neural.network import NetworkSpec

logger = logging.getLogger(__name__)

FORMAT = "manifoldlab-network/1"
DTYPE = np.dtype("<f8")


def save_network(net: NetworkSpec, path: Union[str, Path]) -> Path:
    """
    Write ``net`` to ``path``.

    Returns
    -------
    Path
        The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {"format": FORMAT, "parameter_count": net.parameter_count, **net.header()}
    with path.open("wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        fh.write(net.flat_parameters().astype(DTYPE).tobytes())
    logger.debug("saved %d parameters to %s", net.parameter_count, path)
    return path


def load_network(path: Union[str, Path]) -> NetworkSpec:
    """
    Read a checkpoint written by :func:`save_network`.

    Raises
    ------
    InvalidParameterError
        If the header is malformed or names an unknown format.
    ShapeError
        If the parameter block has the wrong size or the layers do not chain.
    """
    raw = Path(path).read_bytes()
    head, sep, body = raw.partition(b"\n")
    if not sep:
        raise InvalidParameterError(f"{path}: missing checkpoint header")
    try:
        header = json.loads(head.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise InvalidParameterError(f"{path}: unreadable checkpoint header ({e})") from None
    if header.get("format") != FORMAT:
        raise InvalidParameterError(f"{path}: unsupported format {header.get('format')!r}")

    values = np.frombuffer(body, dtype=DTYPE).astype(np.float64)
    expected = int(header.get("parameter_count", -1))
    if len(body) % DTYPE.itemsize or values.size != expected:
        raise ShapeError(
            f"{path}: parameter block holds {len(body) / DTYPE.itemsize:g} values, "
            f"header declares {expected}"
        )

    layers = []
    offset = 0
    for spec in header["layers"]:
        w_shape, b_shape = parameter_shapes(spec)
        w_size, b_size = int(np.prod(w_shape)), int(np.prod(b_shape))
        weights = values[offset : offset + w_size].reshape(w_shape)
        offset += w_size
        bias = values[offset : offset + b_size].reshape(b_shape)
        offset += b_size
        layers.append(layer_from_header(spec, weights.copy(), bias.copy()))
    if offset != values.size:
        raise ShapeError(f"{path}: layer shapes use {offset} of {values.size} parameters")
    return NetworkSpec(
        layers,
        input_dim=int(header["input_dim"]),
        output_dim=int(header["output_dim"]),
        seed=header.get("seed"),
    )
