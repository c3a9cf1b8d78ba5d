""" Unit tests for blocks"""

# License: BSD 3 clause

import unittest

import torch
import torch.nn.functional as F

from ellie import (BlockConfig, BLOCK_KINDS, PartialConv, MBRConv, ChannelAttention, DWSConv,
                   CrossAttention, ICNModulate, IlluminationAdjust, simple_gate, phase_transfer,
                   icn_modulate, mbr_conv_forward, dws_conv,
                   retinex_reconstruct, ConfigError, ShapeError, DomainError)


def image(shape, seed=0, dtype=torch.float32):
    return torch.rand(*shape, generator=torch.Generator().manual_seed(seed), dtype=dtype)


def numel(module):
    return sum(p.numel() for p in module.parameters())


# (kind, config) pairs covering every learnable block kind
COUNTED = [
    ('conv', BlockConfig(5, 7, kernel=3)),
    ('conv', BlockConfig(4, 4, kernel=5, bias=False)),
    ('dws', BlockConfig(8, 16, kernel=3)),
    ('pconv', BlockConfig(8, ratio=0.25)),
    ('mbr', BlockConfig(3, 8, branches=((5, 5), (3, 3), (1, 1), (1, 3), (3, 1)))),
    ('mbr', BlockConfig(8, 8, branches=((3, 3),), identity=True)),
    ('mbr', BlockConfig(8, 8, branches=((3, 3), (1, 1)), use_bn=False)),
    ('res_dws', BlockConfig(12, norm='group')),
    ('res_dws', BlockConfig(12, norm='none')),
    ('down', BlockConfig(8, 16)),
    ('up', BlockConfig(16, 8)),
    ('norm', BlockConfig(6, norm='layer')),
    ('ca', BlockConfig(16, reduction=4)),
    ('sca', BlockConfig(16)),
    ('spatial_gate', BlockConfig(16, kernel=7)),
    ('naf', BlockConfig(16, expansion=2.0)),
    ('naf', BlockConfig(16, expansion=2.0, use_sca=False)),
    ('xattn', BlockConfig(16, kv_channels=8, embed=12, heads=3)),
    ('icn', BlockConfig(16)),
    ('illum_adjust', BlockConfig(1)),
]


class TestParamCounts(unittest.TestCase):
    """Tests for config-only parameter accounting."""

    @staticmethod
    def test_counts_match_modules():
        """Test every block's config count equals its instantiated count"""
        for kind, cfg in COUNTED:
            block = BLOCK_KINDS[kind]
            assert block.param_count(cfg) == numel(block(cfg)), kind

    @staticmethod
    def test_dws_closed_form():
        """Test the depthwise-separable count in * k^2 + in * out + biases"""
        assert BLOCK_KINDS['dws'].param_count(BlockConfig(8, 16, kernel=3)) == 224

    @staticmethod
    def test_partial_share_rounds_up():
        """Test the convolved share of a partial conv is ceil(ratio * C)"""
        assert PartialConv(BlockConfig(6, ratio=0.25)).split == 2
        assert PartialConv(BlockConfig(8, ratio=0.25)).split == 2


class TestConvBlocks(unittest.TestCase):
    """Tests for convolutional blocks."""

    @staticmethod
    def test_shapes():
        """Test output shapes, including resampling"""
        x = image((2, 8, 16, 16))
        assert BLOCK_KINDS['dws'](BlockConfig(8, 12))(x).shape == (2, 12, 16, 16)
        assert BLOCK_KINDS['down'](BlockConfig(8, 16))(x).shape == (2, 16, 8, 8)
        assert BLOCK_KINDS['up'](BlockConfig(8, 4))(x).shape == (2, 4, 32, 32)
        assert BLOCK_KINDS['res_dws'](BlockConfig(8))(x).shape == x.shape

    @staticmethod
    def test_partial_passes_tail_through():
        """Test untouched channels of a partial conv are copied exactly"""
        x = image((1, 8, 10, 10), seed=1)
        out = PartialConv(BlockConfig(8, ratio=0.25))(x)
        assert torch.equal(out[:, 2:], x[:, 2:])

    @staticmethod
    def test_zero_init_residual_is_identity():
        """Test a zero-initialized residual block returns its input"""
        x = image((1, 8, 9, 9), seed=2)
        block = BLOCK_KINDS['res_dws'](BlockConfig(8, zero_init=True))
        assert torch.allclose(block(x), x)

    @staticmethod
    def test_translation_equivariance():
        """Test shifting the input shifts the interior of a conv output"""
        x = image((1, 4, 24, 24), seed=3)
        block = BLOCK_KINDS['conv'](BlockConfig(4, 4, kernel=3, activation='gelu')).eval()
        shifted = torch.roll(x, shifts=(2, 3), dims=(-2, -1))
        a = torch.roll(block(x), shifts=(2, 3), dims=(-2, -1))[..., 6:-6, 6:-6]
        b = block(shifted)[..., 6:-6, 6:-6]
        assert torch.allclose(a, b, atol=1e-6)

    def test_partial_needs_equal_channels(self):
        """Test a partial conv with differing in/out channels is rejected"""
        with self.assertRaises(ConfigError):
            PartialConv.check(BlockConfig(8, 4), [8])

    @staticmethod
    def test_dws_delta_identity():
        """Test a centred-delta depthwise and identity pointwise reproduce the input"""
        cfg = BlockConfig(4, 4, kernel=3)
        block = DWSConv(cfg)
        with torch.no_grad():
            block.depthwise.weight.zero_()
            block.depthwise.weight[:, :, 1, 1] = 1.0
            block.pointwise.weight.copy_(torch.eye(4).view(4, 4, 1, 1))
            block.depthwise.bias.zero_()
            block.pointwise.bias.zero_()
        x = image((2, 4, 9, 7), seed=4)
        assert torch.allclose(dws_conv(x, cfg, block), x)
        assert dws_conv(x, BlockConfig(4, 6, kernel=5)).shape == (2, 6, 9, 7)

    def test_dws_functional_errors(self):
        """Test channel and config mismatches in the functional form"""
        cfg = BlockConfig(4, 4, kernel=3)
        with self.assertRaises(ShapeError):
            dws_conv(image((1, 3, 8, 8)), cfg)
        with self.assertRaises(ConfigError):
            dws_conv(image((1, 4, 8, 8)), cfg, DWSConv(BlockConfig(4, 4, kernel=5)))

    @staticmethod
    def test_mbr_functional_form():
        """Test summing the stored branches matches an eval-mode MBRConv"""
        block = MBRConv(BlockConfig(4, 4, branches=((3, 3), (1, 3), (1, 1)), identity=True))
        block.train()
        with torch.no_grad():
            for _ in range(3):
                block(image((2, 4, 8, 8), seed=7) * 2.0 + 0.5)
        block.eval()
        x = image((1, 4, 8, 8), seed=8)
        with torch.no_grad():
            assert torch.allclose(mbr_conv_forward(x, block.branch_specs()), block(x),
                                  atol=1e-5)
        with torch.no_grad():
            assert torch.allclose(mbr_conv_forward(x, block.branch_specs()[1:2]),
                                  block.norms[1](block.convs[1](x)), atol=1e-5)

    def test_mbr_functional_channel_mismatch(self):
        """Test branches with differing channels are rejected"""
        wide = MBRConv(BlockConfig(4, 8)).branch_specs()
        narrow = MBRConv(BlockConfig(4, 4)).branch_specs()
        with self.assertRaises(ConfigError):
            mbr_conv_forward(image((1, 4, 8, 8)), wide + narrow)

    def test_mbr_identity_needs_equal_channels(self):
        """Test an identity branch with differing in/out channels is rejected"""
        with self.assertRaises(ConfigError):
            MBRConv(BlockConfig(4, 8, identity=True))

    def test_bad_config(self):
        """Test invalid block settings are rejected"""
        with self.assertRaises(ConfigError):
            BlockConfig(4, kernel=4)
        with self.assertRaises(ConfigError):
            BlockConfig(4, ratio=0.0)
        with self.assertRaises(ConfigError):
            BlockConfig(4, branches=((2, 3),))
        with self.assertRaises(ConfigError):
            BlockConfig(0)


class TestAttention(unittest.TestCase):
    """Tests for attention and gating blocks."""

    @staticmethod
    def test_channel_weights_in_unit_interval():
        """Test channel attention weights lie in [0, 1]"""
        block = ChannelAttention(BlockConfig(16, reduction=4))
        w = block.weights(image((2, 16, 8, 8)) * 10 - 5)
        assert w.shape == (2, 16, 1, 1)
        assert float(w.min()) >= 0.0 and float(w.max()) <= 1.0

    def test_reduction_must_divide(self):
        """Test a reduction that does not divide the channels is rejected"""
        with self.assertRaises(ConfigError):
            ChannelAttention(BlockConfig(10, reduction=4))

    @staticmethod
    def test_simple_gate_product():
        """Test simple_gate multiplies the two channel halves"""
        x = image((1, 6, 4, 4))
        assert torch.allclose(simple_gate(x), x[:, :3] * x[:, 3:])

    def test_simple_gate_odd(self):
        """Test simple_gate rejects odd channel counts"""
        with self.assertRaises(ShapeError):
            simple_gate(image((1, 5, 4, 4)))

    @staticmethod
    def test_naf_shape():
        """Test a NAF block keeps its input shape"""
        x = image((2, 16, 12, 12))
        assert BLOCK_KINDS['naf'](BlockConfig(16))(x).shape == x.shape

    @staticmethod
    def test_cross_attention_rows_sum_to_one():
        """Test attention rows are distributions and padded keys get no weight"""
        block = CrossAttention(BlockConfig(8, kv_channels=4, embed=8, heads=2, window=4))
        q, kv = image((1, 8, 6, 7), seed=1), image((1, 4, 6, 7), seed=2)
        out, attention = block(q, kv, return_attention=True)
        assert out.shape == q.shape
        assert torch.allclose(attention.sum(-1), torch.ones_like(attention.sum(-1)), atol=1e-5)
        # bottom-right window covers rows 4..7 and cols 4..7; row 6 and col 7 are padding
        last = attention[-1]
        valid = torch.zeros(4, 4, dtype=torch.bool)
        valid[:2, :3] = True
        assert float(last[..., ~valid.flatten()].abs().max()) == 0.0

    @staticmethod
    def test_cross_attention_large_window_is_global():
        """Test a window covering the image matches global attention"""
        torch.manual_seed(0)
        local = CrossAttention(BlockConfig(8, embed=8, heads=2, window=16))
        full = CrossAttention(BlockConfig(8, embed=8, heads=2, window=None))
        full.load_state_dict(local.state_dict())
        q, kv = image((1, 8, 16, 16), seed=3), image((1, 8, 16, 16), seed=4)
        assert torch.allclose(local(q, kv), full(q, kv), atol=1e-5)

    def test_cross_attention_errors(self):
        """Test heads that do not divide embed and mismatched sources"""
        with self.assertRaises(ConfigError):
            CrossAttention(BlockConfig(8, embed=8, heads=3))
        block = CrossAttention(BlockConfig(8, heads=2))
        with self.assertRaises(ShapeError):
            block(image((1, 8, 8, 8)), image((1, 8, 4, 4)))


class TestModulation(unittest.TestCase):
    """Tests for luminance modulation and illumination curves."""

    @staticmethod
    def test_icn_starts_as_instance_norm():
        """Test a fresh ICN block equals plain instance normalization"""
        x = image((2, 8, 8, 8))
        block = ICNModulate(BlockConfig(8))
        assert torch.allclose(block(x, 0.3), F.instance_norm(x), atol=1e-6)

    @staticmethod
    def test_icn_luminance_affine():
        """Test gain and shift follow g0 + g1 * L and b0 + b1 * L"""
        block = ICNModulate(BlockConfig(2))
        with torch.no_grad():
            block.gain1.fill_(2.0)
            block.shift1.fill_(1.0)
        gain, shift = block.affine(torch.full((1, 1, 1, 1), 0.5))
        assert torch.allclose(gain, torch.full((1, 2, 1, 1), 2.0))
        assert torch.allclose(shift, torch.full((1, 2, 1, 1), 0.5))

    @staticmethod
    def test_icn_functional_form():
        """Test the functional form matches calling the block"""
        block = ICNModulate(BlockConfig(4))
        with torch.no_grad():
            block.gain1.fill_(0.5)
            block.shift0.fill_(-0.25)
        x = image((2, 4, 8, 8))
        assert torch.allclose(icn_modulate(x, 0.6, block.cfg, block), block(x, 0.6))
        fresh = icn_modulate(x, 0.6, BlockConfig(4))
        assert torch.allclose(fresh, F.instance_norm(x), atol=1e-6)

    @staticmethod
    def test_icn_luminance_from_image():
        """Test luminance may be given as an RGB image"""
        block = ICNModulate(BlockConfig(4))
        out = block(image((2, 4, 8, 8)), image((2, 3, 8, 8), seed=5))
        assert out.shape == (2, 4, 8, 8)

    def test_icn_luminance_domain(self):
        """Test luminance outside [0, 1] is rejected"""
        with self.assertRaises(DomainError):
            ICNModulate(BlockConfig(4))(image((1, 4, 4, 4)), 1.5)

    @staticmethod
    def test_illumination_adjust_starts_at_identity():
        """Test the learnable curve starts as the identity on [eps, 1]"""
        illum = 0.05 + 0.95 * image((1, 1, 8, 8))
        assert torch.allclose(IlluminationAdjust(BlockConfig(1))(illum), illum)


class TestPhaseTransfer(unittest.TestCase):
    """Tests for Fourier phase transfer."""

    @staticmethod
    def test_same_input_is_identity():
        """Test transferring a map's phase onto itself returns the map"""
        x = image((2, 3, 16, 16), dtype=torch.float64)
        assert torch.allclose(phase_transfer(x, x), x, atol=1e-10)

    @staticmethod
    def test_amplitude_and_phase():
        """Test the output carries a's amplitude and b's phase"""
        a = image((1, 2, 16, 16), seed=1, dtype=torch.float64)
        b = image((1, 2, 16, 16), seed=2, dtype=torch.float64)
        spec = torch.fft.fft2(phase_transfer(a, b))
        spec_b = torch.fft.fft2(b)
        assert torch.allclose(spec.abs(), torch.fft.fft2(a).abs(), atol=1e-8)
        phase_diff = torch.angle(spec * spec_b.conj())
        assert float(phase_diff.abs().max()) < 1e-6

    @staticmethod
    def test_zero_phase_source_keeps_a():
        """Test bins with no phase source keep the amplitude source"""
        a = image((1, 1, 8, 8), dtype=torch.float64)
        assert torch.allclose(phase_transfer(a, torch.zeros_like(a)), a, atol=1e-10)

    def test_shape_mismatch(self):
        """Test differently shaped maps are rejected"""
        with self.assertRaises(ShapeError):
            phase_transfer(image((1, 2, 8, 8)), image((1, 2, 8, 4)))


class TestGraphOps(unittest.TestCase):
    """Tests for parameter-free graph ops."""

    @staticmethod
    def test_retinex_unit_illumination():
        """Test unit illumination and zero residual return the input"""
        x = image((1, 3, 4, 4))
        assert torch.allclose(retinex_reconstruct(x, torch.ones(1, 3, 4, 4),
                                                  torch.zeros(1, 3, 4, 4)), x)

    @staticmethod
    def test_retinex_brightens_and_clamps():
        """Test illumination 0.5 doubles the input and clamps at 1"""
        x = torch.tensor([0.2, 0.7]).view(1, 1, 1, 2)
        out = retinex_reconstruct(x, torch.full_like(x, 0.5), torch.zeros_like(x))
        assert torch.allclose(out, torch.tensor([0.4, 1.0]).view(1, 1, 1, 2))

    def test_slice_out_of_range(self):
        """Test a slice beyond the input channels is rejected"""
        with self.assertRaises(ConfigError):
            BLOCK_KINDS['op'].check(BlockConfig(3, 2, options={'op': 'slice', 'start': 2,
                                                               'stop': 4}), [3])

    def test_unknown_op(self):
        """Test an unknown op name is rejected"""
        with self.assertRaises(ConfigError):
            BLOCK_KINDS['op'].check(BlockConfig(3, options={'op': 'sqrt'}), [3])


if __name__ == '__main__':
    unittest.main()
