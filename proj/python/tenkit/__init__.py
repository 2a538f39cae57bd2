"""Sparse tensor formats, MTTKRP kernels, CP-ALS and a GPU scheduling model."""

import json as _json

from ._core import (
    CapacityError,
    NumericalError,
    ParseError,
    Tensor,
    cp_als,
    generate,
    mttkrp,
    mttkrp_dense,
    pinv_spsd,
    read_frostt,
    slice_census,
    write_frostt,
)
from . import _core

__all__ = [
    "CapacityError",
    "NumericalError",
    "ParseError",
    "Tensor",
    "cp_als",
    "generate",
    "mttkrp",
    "mttkrp_dense",
    "pinv_spsd",
    "read_frostt",
    "simulate",
    "slice_census",
    "stats",
    "storage",
    "write_frostt",
]

FORMATS = ("coo", "csf", "bcsf", "hbcsf")


def stats(tensor, mode_order=None):
    """Order, dims, density and slice/fiber populations under `mode_order`."""
    return _json.loads(_core._stats(tensor, mode_order))


def storage(tensor, format="hbcsf", mode=0, fiber_threshold=128):
    """Index-word accounting of `format` rooted at `mode`."""
    return _json.loads(_core._storage(tensor, format, mode, fiber_threshold))


def simulate(tensor, thresholds=(None, 1024, 128, 32), mode=0, sms=56, block_size=512, warp_size=32):
    """Threshold sweep through the scheduling model; None means no split."""
    return _json.loads(_core._simulate(tensor, list(thresholds), mode, sms, block_size, warp_size))
