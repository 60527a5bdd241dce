"""Explain an image enhancement as a short sequence of global editing operators."""
from .image import distance, load_image, resize_box, save_image
from .kernels import BACKEND
from .metrics import compute_all, delta_e, psnr, ssim
from .operators import (Channels, EditSequence, Family, Operator, apply, apply_sequence,
                        enumerate_all, op_histogram, parse, serialize)
from .search import SearchConfig, SearchReport, exie_search

__all__ = [
    "BACKEND",
    "Channels",
    "EditSequence",
    "Family",
    "Operator",
    "SearchConfig",
    "SearchReport",
    "apply",
    "apply_sequence",
    "compute_all",
    "delta_e",
    "distance",
    "enumerate_all",
    "exie_search",
    "load_image",
    "op_histogram",
    "parse",
    "psnr",
    "resize_box",
    "save_image",
    "serialize",
    "ssim",
]
__version__ = "0.1.0"
