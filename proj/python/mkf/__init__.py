"""Multi-kernel filtering, baseline denoisers, noise models and image metrics.

Images are 2-D float64 NumPy arrays indexed ``[row, column]``.
"""

from ._core import (
    RNG_ALGORITHM,
    FormatError,
    IoError,
    add_noise,
    apply_filter,
    bilateral,
    cf_denoise,
    cluster_tree,
    load_raster,
    mae,
    mkf_denoise,
    natural_scene,
    noise_field,
    phantom,
    save_raster,
    set_threads,
    ssim,
    tv_denoise,
)

__all__ = [
    "RNG_ALGORITHM",
    "FormatError",
    "IoError",
    "add_noise",
    "apply_filter",
    "bilateral",
    "cf_denoise",
    "cluster_tree",
    "load_raster",
    "mae",
    "mkf_denoise",
    "natural_scene",
    "noise_field",
    "phantom",
    "save_raster",
    "set_threads",
    "ssim",
    "tv_denoise",
]
