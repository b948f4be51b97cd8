"""Batched eigendecomposition of small symmetric matrices."""

from ._core import (
    BadMagic,
    BedError,
    BlockTooLarge,
    DimMismatch,
    IoError,
    NoConvergence,
    NonFinite,
    NonPositiveSpectrum,
    NonSymmetric,
    ShapeMismatch,
    TruncatedPayload,
    eig,
    gen_spd,
    jacobi_eig,
    load_bed,
    matrix_power,
    save_bed,
    tridiagonalize,
    zca_whiten,
)

__all__ = [
    "BadMagic",
    "BedError",
    "BlockTooLarge",
    "DimMismatch",
    "IoError",
    "NoConvergence",
    "NonFinite",
    "NonPositiveSpectrum",
    "NonSymmetric",
    "ShapeMismatch",
    "TruncatedPayload",
    "eig",
    "gen_spd",
    "jacobi_eig",
    "load_bed",
    "matrix_power",
    "save_bed",
    "tridiagonalize",
    "zca_whiten",
]
