""" Executable model built from a ModelSpec."""

# License: BSD 3 clause

import torch
import torch.nn.functional as F
from torch import nn

from ellie.colorspace import (HviImage, HviTransform, rgb_to_yuv, yuv_to_rgb,
                              rgb_to_lab, lab_to_rgb)
from ellie.colorspace._checks import check_channels

# brings Lab into roughly unit range for the graph
_LAB_SCALE = torch.tensor([100.0, 110.0, 110.0]).view(1, 3, 1, 1)


class GraphEnhancer(nn.Module):
    """Runs a ModelSpec graph on RGB images.

    The input is padded (reflect) up to the spec's size multiple, converted
    into the spec's color space, pushed through the nodes in topological
    order, converted back, cropped and clamped to [0, 1].

    Parameters
    ----------
    spec: ModelSpec
        Graph to instantiate.
    """

    def __init__(self, spec):
        super().__init__()
        self.spec = spec
        self.nodes = nn.ModuleDict({n.name: n.block(n.config) for n in spec.nodes})
        self.colorspace = None
        if spec.colorspace_mode == 'hvi':
            self.colorspace = HviTransform(spec.cfg.get('hvi_k', 1.0))

    @property
    def size_multiple(self):
        return self.spec.size_multiple

    @property
    def receptive_radius(self):
        return self.spec.receptive_radius()

    def param_count(self):
        return sum(p.numel() for p in self.parameters())

    def encode(self, rgb):
        mode = self.spec.colorspace_mode
        if mode == 'hvi':
            hvi = self.colorspace(rgb)
            return torch.cat([hvi.hv, hvi.intensity], dim=1)
        if mode == 'yuv':
            return rgb_to_yuv(rgb)
        if mode == 'lab':
            return rgb_to_lab(rgb) / _LAB_SCALE.to(rgb)
        return rgb

    def decode(self, y):
        mode = self.spec.colorspace_mode
        if mode == 'hvi':
            return self.colorspace.inverse(HviImage(y[:, :2], y[:, 2:3], self.colorspace.k))
        if mode == 'yuv':
            return yuv_to_rgb(y)
        if mode == 'lab':
            return lab_to_rgb(y * _LAB_SCALE.to(y))
        return y

    def _pad(self, x):
        m = self.size_multiple
        pad_h, pad_w = (-x.shape[-2]) % m, (-x.shape[-1]) % m
        if not (pad_h or pad_w):
            return x
        mode = 'reflect' if pad_h < x.shape[-2] and pad_w < x.shape[-1] else 'replicate'
        return F.pad(x, (0, pad_w, 0, pad_h), mode=mode)

    def run_graph(self, x):
        values = {}
        for node in self.spec.order:
            module = self.nodes[node.name]
            if node.kind == 'input':
                values[node.name] = module(x)
                continue
            ins = [values[i] for i in node.inputs]
            if node.merge == 'concat':
                ins = [torch.cat(ins, dim=1)]
            elif node.merge == 'add':
                ins = [sum(ins[1:], ins[0])]
            elif node.merge == 'mul':
                out = ins[0]
                for t in ins[1:]:
                    out = out * t
                ins = [out]
            values[node.name] = module(*ins)
        return values[self.spec.output]

    def forward(self, x):
        check_channels(x, 3)
        height, width = x.shape[-2:]
        y = self.run_graph(self.encode(self._pad(x)))
        return self.decode(y)[..., :height, :width].clamp(0.0, 1.0)
