""" Lightweight differentiable building blocks."""

# License: BSD 3 clause

from .config import BlockConfig, NORM_KINDS, ACTIVATIONS
from .base import BLOCK_KINDS, LayerNorm2d, make_norm, make_activation
from .conv import (Conv, DWSConv, PartialConv, MBRConv, ResidualDWSBlock, Downsample,
                   Upsample, Norm, dws_conv, mbr_conv_forward, reparameterized_config)
from .attention import (ChannelAttention, SimplifiedChannelAttention, SpatialGate,
                        SimpleGate, NAFBlock, CrossAttention, simple_gate)
from .modulation import ICNModulate, IlluminationAdjust, icn_modulate
from .phase import PhaseTransfer, phase_transfer
from .ops import (GraphInput, GraphOp, PreprocessBlock, retinex_reconstruct,
                  to_illumination, RETINEX_EPS)
