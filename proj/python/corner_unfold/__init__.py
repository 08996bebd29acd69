"""Homoclinic corners of piecewise-linear maps.

Thin wrapper over the compiled core; the command line tool `corner-unfold`
covers the same ground with file output.
"""

from ._core import (
    ConfigError,
    Map,
    NormalFormParams,
    NumericError,
    Saddle,
    __version__,
    bcb_sequence,
    classify_cell,
    locate_corner,
    normalise_config,
    rotational_word,
    run,
    synthetic_bcb,
    transversality_certificate,
)

__all__ = [
    "ConfigError",
    "Map",
    "NormalFormParams",
    "NumericError",
    "Saddle",
    "__version__",
    "bcb_sequence",
    "classify_cell",
    "locate_corner",
    "normalise_config",
    "rotational_word",
    "run",
    "synthetic_bcb",
    "transversality_certificate",
]
