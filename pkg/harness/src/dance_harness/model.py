"""Small CNN classifiers with a fixed pooling plan.

Each block is convolution (3x3, stride 1, same padding) -> ReLU ->
max-pool (5x5 kernel, stride 2). The head flattens, applies one hidden
fully connected layer with ReLU, then a linear layer and log-softmax.
Channel widths grow 16, 32, 64, 128 over blocks 1..4.
"""

from dataclasses import dataclass

import torch
from torch import nn

from .errors import ConfigError

POOL_KERNEL = 5
POOL_STRIDE = 2
CHANNEL_WIDTHS = (16, 32, 64, 128)


@dataclass(frozen=True)
class CnnSpec:
    n_blocks: int = 3
    in_channels: int = 1
    input_size: int = 380
    hidden_width: int = 128

    def __post_init__(self):
        if self.n_blocks not in (1, 2, 3, 4):
            raise ConfigError(f"n_blocks must be in 1..4, got {self.n_blocks}")
        if self.in_channels < 1 or self.input_size < 1 or self.hidden_width < 1:
            raise ConfigError("in_channels, input_size, hidden_width must be >= 1")

    def to_dict(self) -> dict:
        return {
            "n_blocks": self.n_blocks,
            "in_channels": self.in_channels,
            "input_size": self.input_size,
            "hidden_width": self.hidden_width,
        }


def pooled_size(d: int) -> int:
    """Spatial dimension after one 5x5 stride-2 max-pool (no padding)."""
    return (d - POOL_KERNEL) // POOL_STRIDE + 1


def spatial_chain(spec: CnnSpec) -> list[int]:
    """Spatial dims entering each block and leaving the last: length n_blocks+1."""
    dims = [spec.input_size]
    for _ in range(spec.n_blocks):
        dims.append(pooled_size(dims[-1]))
    return dims


class CnnClassifier(nn.Module):
    """Stacked conv/pool blocks with a two-layer fully connected head.

    forward() returns log-probabilities, one row per input image.
    """

    def __init__(self, spec: CnnSpec, n_classes: int):
        super().__init__()
        if n_classes < 2:
            raise ConfigError("n_classes must be >= 2")
        self.spec = spec
        self.n_classes = n_classes
        blocks = []
        in_ch = spec.in_channels
        for width in CHANNEL_WIDTHS[: spec.n_blocks]:
            blocks += [
                nn.Conv2d(in_ch, width, kernel_size=3, stride=1, padding="same"),
                nn.ReLU(),
                nn.MaxPool2d(kernel_size=POOL_KERNEL, stride=POOL_STRIDE),
            ]
            in_ch = width
        self.blocks = nn.Sequential(*blocks)
        final_dim = spatial_chain(spec)[-1]
        self.flat_features = in_ch * final_dim * final_dim
        self.head = nn.Sequential(
            nn.Flatten(),
            nn.Linear(self.flat_features, spec.hidden_width),
            nn.ReLU(),
            nn.Linear(spec.hidden_width, n_classes),
            nn.LogSoftmax(dim=1),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.blocks(x))


def build_model(spec: CnnSpec, n_classes: int) -> CnnClassifier:
    return CnnClassifier(spec, n_classes)
