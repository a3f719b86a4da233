"""JSON formats for channels, codes, and states.

Matrices are arrays of rows; every entry is a ``[re, im]`` pair of decimal
numbers. Serialization uses the shortest digit strings that round-trip
IEEE-754 doubles exactly, so parse-then-emit is lossless.
"""

from __future__ import annotations

import json

import numpy as np

from .channels import KrausChannel
from .codes import IsometricEncoding, SubsystemDecomposition
from .errors import ContractViolation
from .opcore import as_matrix


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def matrix_from_json(rows) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ContractViolation(f"malformed matrix payload: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ContractViolation(
            f"matrix payload must be rows of [re, im] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_dict(channel: KrausChannel) -> dict:
    return {
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "kraus": [matrix_to_json(k) for k in channel.kraus],
    }


def channel_from_dict(payload: dict, tp_tol: float | None = None) -> KrausChannel:
    try:
        kraus = [matrix_from_json(k) for k in payload["kraus"]]
        dim_in, dim_out = int(payload["dim_in"]), int(payload["dim_out"])
    except (KeyError, TypeError) as exc:
        raise ContractViolation(f"malformed channel payload: {exc}") from exc
    for k in kraus:
        if k.shape != (dim_out, dim_in):
            raise ContractViolation(
                f"Kraus shape {k.shape} does not match dims ({dim_out}, {dim_in})"
            )
    kwargs = {} if tp_tol is None else {"tp_tol": tp_tol}
    return KrausChannel(kraus, **kwargs)


def encoding_to_dict(encoding: IsometricEncoding) -> dict:
    dec = encoding.decomposition
    return {
        "d_S": dec.d_s,
        "d_F": dec.d_f,
        "d_R": dec.d_r,
        "basis": matrix_to_json(dec.basis),
        "tau": matrix_to_json(encoding.cofactor),
    }


def encoding_from_dict(payload: dict) -> IsometricEncoding:
    try:
        dec = SubsystemDecomposition(
            int(payload["d_S"]),
            int(payload["d_F"]),
            int(payload["d_R"]),
            matrix_from_json(payload["basis"]),
        )
        return IsometricEncoding(dec, matrix_from_json(payload["tau"]))
    except (KeyError, TypeError) as exc:
        raise ContractViolation(f"malformed code payload: {exc}") from exc


def state_to_json(rho) -> list:
    return matrix_to_json(as_matrix(rho))


def state_from_json(payload) -> np.ndarray:
    if isinstance(payload, dict) and "matrix" in payload:
        payload = payload["matrix"]
    return matrix_from_json(payload)


def dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)
