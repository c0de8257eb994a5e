"""Built-in workload descriptors for the analytic PPA model.

These are condensed layer lists: a handful of representative layers per
network with realistic weight-matrix shapes and op counts, enough to give
each workload a distinct optimization landscape. They are model inputs, not
measurements.
"""

from __future__ import annotations

from .surrogate import LayerDesc, Workload

__all__ = ["get_workload", "WORKLOADS"]


def _conv(rows, cols, ops, act=1):
    return LayerDesc("conv", rows, cols, ops, act)


def _linear(rows, cols, ops, act=1):
    return LayerDesc("linear", rows, cols, ops, act)


def _attn(rows, cols, ops, act=1):
    return LayerDesc("attention", rows, cols, ops, act)


def _resnet50() -> Workload:
    # Stages of a 50-layer residual CNN, condensed to one layer per stage
    # shape; rows = k*k*C_in, cols = C_out.
    return Workload("resnet50", (
        _conv(147, 64, 236_000_000, 4),
        _conv(576, 64, 231_000_000, 4),
        _conv(576, 128, 231_000_000, 3),
        _conv(1152, 128, 462_000_000, 3),
        _conv(1152, 256, 231_000_000, 2),
        _conv(2304, 256, 462_000_000, 2),
        _conv(2304, 512, 231_000_000, 1),
        _conv(4608, 512, 462_000_000, 1),
        _linear(2048, 1000, 4_100_000, 1),
    ))


def _swint() -> Workload:
    # Four stages of windowed attention blocks: QKV/projection/MLP linears
    # on ACIM, score computation over batched window groups on DCIM.
    return Workload("swint", (
        _linear(96, 288, 109_000_000, 4),
        _attn(196, 196, 14_000_000, 32),
        _linear(96, 384, 145_000_000, 4),
        _linear(192, 576, 109_000_000, 2),
        _attn(196, 196, 7_000_000, 16),
        _linear(384, 1152, 218_000_000, 6),
        _attn(196, 196, 14_000_000, 48),
        _linear(384, 1536, 290_000_000, 6),
        _linear(768, 2304, 109_000_000, 2),
        _attn(196, 196, 4_000_000, 8),
        _linear(768, 3072, 145_000_000, 2),
        _linear(768, 1000, 1_000_000, 1),
    ), uses_dcim=True)


def _vitb() -> Workload:
    # 12 identical encoder blocks, condensed: global attention over 197
    # tokens, wider embedding than the hierarchical transformer above.
    return Workload("vitb", (
        _linear(768, 2304, 1_120_000_000, 12),
        _attn(197, 197, 120_000_000, 2364),
        _linear(768, 768, 373_000_000, 12),
        _linear(768, 3072, 1_493_000_000, 12),
        _linear(3072, 768, 1_493_000_000, 12),
        _linear(768, 1000, 1_600_000, 1),
    ), uses_dcim=True)


def _vgg8() -> Workload:
    return Workload("vgg8", (
        _conv(27, 128, 170_000_000, 2),
        _conv(1152, 256, 604_000_000, 2),
        _conv(2304, 512, 604_000_000, 2),
        _linear(8192, 1024, 17_000_000, 1),
        _linear(1024, 10, 21_000, 1),
    ))


def _resnet18() -> Workload:
    return Workload("resnet18", (
        _conv(147, 64, 118_000_000, 2),
        _conv(576, 64, 231_000_000, 4),
        _conv(1152, 128, 231_000_000, 4),
        _conv(2304, 256, 231_000_000, 4),
        _conv(4608, 512, 231_000_000, 4),
        _linear(512, 100, 102_000, 1),
    ))


WORKLOADS = {
    "resnet50": _resnet50,
    "swint": _swint,
    "vitb": _vitb,
    "vgg8": _vgg8,
    "resnet18": _resnet18,
}

_ALIASES = {
    "resnet-50": "resnet50", "resnet 50": "resnet50",
    "swin-t": "swint", "swin t": "swint", "swin transformer tiny": "swint",
    "vit-b": "vitb", "vit b": "vitb", "vision transformer base": "vitb",
    "vgg-8": "vgg8", "resnet-18": "resnet18", "resnet 18": "resnet18",
}


def get_workload(name: str) -> Workload:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in WORKLOADS:
        raise KeyError(f"unknown workload {name!r}")
    return WORKLOADS[key]()
