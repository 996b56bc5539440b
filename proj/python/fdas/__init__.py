"""Python bindings for the FDAS pipeline library."""

from ._fdas import (
    choose_buffering,
    fir,
    fop,
    harmonic_sum,
    ideal_period,
    multi_device_period,
    run,
    template_bank,
    total_latency,
)

__all__ = [
    "choose_buffering",
    "fir",
    "fop",
    "harmonic_sum",
    "ideal_period",
    "multi_device_period",
    "run",
    "template_bank",
    "total_latency",
]
