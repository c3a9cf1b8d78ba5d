""" Classes and functions for folding normalization into convolutions and
merging parallel convolution branches into one kernel."""

# License: BSD 3 clause

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import torch
import torch.nn.functional as F

from ellie.errors import ConfigError


class NormStats(NamedTuple):
    """Frozen batch-normalization statistics and affine parameters, one
    entry per output channel."""
    mean: torch.Tensor
    var: torch.Tensor
    gamma: torch.Tensor
    beta: torch.Tensor
    eps: float = 1e-5


@dataclass
class ConvBranchSpec:
    """One stride-1, same-padded convolution branch, optionally followed by
    normalization with stored statistics.

    Parameters
    ----------
    weights: tensor
        Kernel of shape (out, in, kh, kw) with odd kh and kw.
    bias: tensor, default: None
        Bias of shape (out,).
    norm_stats: NormStats, default: None
        Normalization applied after the convolution.
    """
    weights: torch.Tensor
    bias: Optional[torch.Tensor] = None
    norm_stats: Optional[NormStats] = None

    def __post_init__(self):
        if self.weights.dim() != 4:
            raise ConfigError("""weights must have shape (out, in, kh, kw).""")
        kh, kw = self.kernel
        if kh % 2 == 0 or kw % 2 == 0:
            raise ConfigError(f"""branch kernel ({kh}, {kw}) must be odd.""")
        if self.norm_stats is not None:
            if bool((self.norm_stats.var < 0).any()):
                raise ConfigError("""norm variance must be at least 0.""")
            if not self.norm_stats.eps > 0:
                raise ConfigError("""norm eps must be greater than 0.""")

    @property
    def kernel(self):
        return tuple(self.weights.shape[-2:])

    @property
    def out_channels(self):
        return self.weights.shape[0]

    @property
    def in_channels(self):
        return self.weights.shape[1]

    @classmethod
    def identity(cls, channels, norm_stats=None):
        """Identity shortcut written as a 1x1 branch."""
        weights = torch.eye(channels).view(channels, channels, 1, 1)
        return cls(weights, None, norm_stats)

    @classmethod
    def from_modules(cls, conv=None, norm=None, channels=None):
        """Extract a branch from a live :code:`nn.Conv2d` and optional
        :code:`nn.BatchNorm2d`; :code:`conv=None` gives an identity branch
        of :code:`channels` channels."""
        stats = None
        if norm is not None:
            count = norm.running_mean.shape[0]
            gamma = norm.weight if norm.affine else torch.ones(count)
            beta = norm.bias if norm.affine else torch.zeros(count)
            stats = NormStats(norm.running_mean.detach().clone(),
                              norm.running_var.detach().clone(),
                              gamma.detach().clone(), beta.detach().clone(), norm.eps)
        if conv is None:
            return cls.identity(channels, stats)
        bias = None if conv.bias is None else conv.bias.detach().clone()
        return cls(conv.weight.detach().clone(), bias, stats)


@dataclass
class ConvParams:
    """Single merged convolution with a square odd kernel."""
    weights: torch.Tensor
    bias: torch.Tensor

    def __post_init__(self):
        if self.weights.shape[-1] != self.weights.shape[-2] or self.weights.shape[-1] % 2 == 0:
            raise ConfigError("""merged kernel must be square and odd.""")
        if not (bool(torch.isfinite(self.weights).all()) and bool(torch.isfinite(self.bias).all())):
            raise ConfigError("""merged parameters must be finite.""")

    @property
    def kernel(self):
        return self.weights.shape[-1]

    def as_branch(self):
        return ConvBranchSpec(self.weights, self.bias)

    def forward(self, x):
        return F.conv2d(x, self.weights, self.bias, padding=self.kernel // 2)


def branch_forward(x, branch):
    """Evaluate one branch with its stored normalization statistics."""
    kh, kw = branch.kernel
    y = F.conv2d(x, branch.weights, branch.bias, padding=(kh // 2, kw // 2))
    stats = branch.norm_stats
    if stats is not None:
        shape = (1, -1, 1, 1)
        y = ((y - stats.mean.view(shape)) / torch.sqrt(stats.var.view(shape) + stats.eps)
             * stats.gamma.view(shape) + stats.beta.view(shape))
    return y


def fold_norm(branch):
    """Fold a branch's normalization into its kernel and bias.

    .. math::

        W' = t W, \\quad b' = \\beta + t (b - \\mu), \\quad
        t = \\gamma / \\sqrt{\\sigma^2 + \\epsilon}

    Parameters
    ----------
    branch: ConvBranchSpec
        Branch to fold. A branch without normalization is returned with an
        explicit bias.

    Returns
    -------
    folded: ConvBranchSpec
        Equivalent branch with :code:`norm_stats=None`.
    """
    bias = branch.bias
    if bias is None:
        bias = torch.zeros(branch.out_channels, dtype=branch.weights.dtype,
                           device=branch.weights.device)
    stats = branch.norm_stats
    if stats is None:
        return replace(branch, bias=bias)

    t = stats.gamma / torch.sqrt(stats.var + stats.eps)
    return ConvBranchSpec(branch.weights * t.view(-1, 1, 1, 1),
                          stats.beta + t * (bias - stats.mean), None)


def pad_kernel(weights, target):
    """Zero-pad a kernel of shape (out, in, kh, kw) to (out, in, target,
    target) with the original taps centred."""
    kh, kw = weights.shape[-2:]
    if target % 2 == 0 or kh % 2 == 0 or kw % 2 == 0:
        raise ConfigError("""kernel sizes and target must be odd.""")
    if kh > target or kw > target:
        raise ConfigError(f"""target {target} is smaller than kernel ({kh}, {kw}).""")
    ph, pw = (target - kh) // 2, (target - kw) // 2
    return F.pad(weights, (pw, pw, ph, ph))


def merge_branches(branches, target=None):
    """Merge parallel branches into one convolution whose output equals the
    sum of the branch outputs.

    Parameters
    ----------
    branches: list of ConvBranchSpec
        Branches sharing input and output channels.
    target: int, default: None
        Odd kernel size of the result. Defaults to the largest branch
        dimension.

    Returns
    -------
    merged: ConvParams
    """
    if len(branches) == 0:
        raise ConfigError("""branches must not be empty.""")
    shapes = {(b.out_channels, b.in_channels) for b in branches}
    if len(shapes) != 1:
        raise ConfigError(f"""branches disagree on (out, in) channels: {sorted(shapes)}.""")
    if target is None:
        target = max(max(b.kernel) for b in branches)

    folded = [fold_norm(b) for b in branches]
    weights = sum(pad_kernel(b.weights, target) for b in folded)
    bias = sum(b.bias for b in folded)
    return ConvParams(weights, bias)
