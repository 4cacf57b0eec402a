"""Nonoverlapping domain decomposition solvers for dual total-variation denoising."""

from ._core import (
    Decomposition,
    InvalidArgument,
    IoError,
    NumericalError,
    add_gaussian_noise,
    divergence,
    dual_energy,
    gradient,
    psnr,
    read_pgm,
    recover_primal,
    reference_solution,
    solve,
    synthetic_image,
    write_pgm,
)

METHODS = ("rj", "pj", "fpj", "gs", "fista")

__all__ = [
    "METHODS",
    "Decomposition",
    "InvalidArgument",
    "IoError",
    "NumericalError",
    "add_gaussian_noise",
    "divergence",
    "dual_energy",
    "gradient",
    "psnr",
    "read_pgm",
    "recover_primal",
    "reference_solution",
    "solve",
    "synthetic_image",
    "write_pgm",
]
