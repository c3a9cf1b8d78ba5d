""" Reference enhancement models."""

# License: BSD 3 clause

from ellie.blocks import BlockConfig, RETINEX_EPS
from ellie.decorators import short_name, lookup
from ellie.errors import ConfigError
from ellie.zoo.budget import enforce_budget
from ellie.zoo.spec import ModelSpec, NodeSpec

MODELS = {}

MBR_BRANCHES = ((5, 5), (3, 3), (1, 1), (1, 3), (3, 1))


class _GraphBuilder:
    """Accumulates NodeSpecs in order."""

    def __init__(self):
        self.nodes = []

    def add(self, name, kind, inputs=(), merge=None, **cfg):
        self.nodes.append(NodeSpec(name, kind, BlockConfig(**cfg), tuple(inputs), merge))
        return name


def _settings(defaults, cfg):
    cfg = dict(cfg or {})
    unknown = sorted(set(cfg) - set(defaults))
    if unknown:
        raise ConfigError(f"""unknown model settings: {', '.join(unknown)}.""")
    return {k: _as_lists(v) for k, v in {**defaults, **cfg}.items()}


def _as_lists(value):
    # JSON-shaped, so specs compare equal after a round trip
    if isinstance(value, (tuple, list)):
        return [_as_lists(v) for v in value]
    return value


def _finish(name, nodes, settings, **kwargs):
    spec = ModelSpec(name, nodes, cfg=settings, **kwargs)
    enforce_budget(spec, settings['max_params'])
    return spec


NORM_UNET_DEFAULTS = {
    'width': 16, 'norm': 'group', 'slot1': 'identity', 'slot2': 'clahe', 'mode': 'luma',
    'clip_limit': 2.0, 'tile_grid': (8, 8), 'bins': 256, 'he_scale': 0.25, 'gamma': 0.5,
    'max_params': 1_000_000}


@short_name('norm_unet', MODELS)
def build_norm_unet(cfg=None):
    """Three-level U-Net of residual depthwise-separable blocks on the
    9-channel preprocessor stack [raw, slot1, slot2].

    Group normalization and GELU sit inside every residual block, and the
    network's zero-initialized output conv is added to the slot1 image, so
    an untrained model returns the slot1 preprocessor output.

    Parameters
    ----------
    cfg: dict, default: None
        Overrides of :code:`NORM_UNET_DEFAULTS`: base 'width', block 'norm',
        Preprocessor settings and 'max_params'.

    Returns
    -------
    spec: ModelSpec
    """
    s = _settings(NORM_UNET_DEFAULTS, cfg)
    w, norm = s['width'], s['norm']
    prep = {k: s[k] for k in ('slot1', 'slot2', 'mode', 'clip_limit', 'tile_grid', 'bins',
                              'he_scale', 'gamma')}
    g = _GraphBuilder()

    x = g.add('x', 'input')
    pre = g.add('pre', 'preprocess', [x], in_channels=3, out_channels=9, options=prep)
    slot1 = g.add('slot1', 'op', [pre], in_channels=9, out_channels=3,
                  options={'op': 'slice', 'start': 3, 'stop': 6})
    stem = g.add('stem', 'conv', [pre], in_channels=9, out_channels=w, activation='gelu')
    enc1 = g.add('enc1', 'res_dws', [stem], in_channels=w, norm=norm)
    down1 = g.add('down1', 'down', [enc1], in_channels=w, out_channels=2 * w)
    enc2 = g.add('enc2', 'res_dws', [down1], in_channels=2 * w, norm=norm)
    down2 = g.add('down2', 'down', [enc2], in_channels=2 * w, out_channels=4 * w)
    mid = g.add('mid', 'res_dws', [down2], in_channels=4 * w, norm=norm)
    up2 = g.add('up2', 'up', [mid], in_channels=4 * w, out_channels=2 * w)
    fuse2 = g.add('fuse2', 'conv', [up2, enc2], 'concat', in_channels=4 * w,
                  out_channels=2 * w, kernel=1)
    dec2 = g.add('dec2', 'res_dws', [fuse2], in_channels=2 * w, norm=norm)
    up1 = g.add('up1', 'up', [dec2], in_channels=2 * w, out_channels=w)
    fuse1 = g.add('fuse1', 'conv', [up1, enc1], 'concat', in_channels=2 * w,
                  out_channels=w, kernel=1)
    dec1 = g.add('dec1', 'res_dws', [fuse1], in_channels=w, norm=norm)
    head = g.add('head', 'conv', [dec1], in_channels=w, out_channels=3, zero_init=True)
    g.add('out', 'op', [slot1, head], 'add', options={'op': 'identity'})

    return _finish('norm_unet', g.nodes, s)


EFFICIENT_HVI_DEFAULTS = {'width': 16, 'heads': 2, 'window': 8, 'hvi_k': 1.0,
                          'max_params': 1_000_000}


@short_name('efficient_hvi', MODELS)
def build_efficient_hvi(cfg=None):
    """Dual-branch model in HVI space.

    An intensity branch and an hv (chroma) branch each run a two-scale
    encoder. At every scale each branch is refined by cross attention whose
    queries come from itself and keys/values from the other branch. On the
    way back up, a phase-transfer block combines the encoder skip's
    amplitude with the decoder's phase. Zero-initialized heads predict
    residuals in HVI space, which are decoded with the learned collapse
    strength.

    Parameters
    ----------
    cfg: dict, default: None
        Overrides of :code:`EFFICIENT_HVI_DEFAULTS`.
    """
    s = _settings(EFFICIENT_HVI_DEFAULTS, cfg)
    w, heads, window = s['width'], s['heads'], s['window']
    g = _GraphBuilder()

    x = g.add('x', 'input')
    sources = {'i': g.add('i_in', 'op', [x], out_channels=1,
                          options={'op': 'slice', 'start': 2, 'stop': 3}),
               'hv': g.add('hv_in', 'op', [x], out_channels=2,
                           options={'op': 'slice', 'start': 0, 'stop': 2})}
    out_ch = {'i': 1, 'hv': 2}

    enc1 = {}
    for b, src in sources.items():
        stem = g.add(f'{b}_stem', 'conv', [src], in_channels=out_ch[b], out_channels=w,
                     activation='gelu')
        enc1[b] = g.add(f'{b}_enc1', 'dws', [stem], in_channels=w, activation='gelu')

    def interact(level, feats, channels, n_heads):
        refined = {}
        for b, other in (('i', 'hv'), ('hv', 'i')):
            att = g.add(f'{b}_att{level}', 'xattn', [feats[b], feats[other]],
                        in_channels=channels, heads=n_heads, window=window)
            refined[b] = g.add(f'{b}_res{level}', 'op', [feats[b], att], 'add',
                               in_channels=channels, options={'op': 'identity'})
        return refined

    skip = interact(1, enc1, w, heads)
    enc2 = {}
    for b in sources:
        down = g.add(f'{b}_down', 'down', [skip[b]], in_channels=w, out_channels=2 * w)
        enc2[b] = g.add(f'{b}_enc2', 'dws', [down], in_channels=2 * w, activation='gelu')
    deep = interact(2, enc2, 2 * w, 2 * heads)

    deltas = {}
    for b in sources:
        up = g.add(f'{b}_up', 'up', [deep[b]], in_channels=2 * w, out_channels=w)
        ptb = g.add(f'{b}_ptb', 'ptb', [skip[b], up], in_channels=w)
        dec = g.add(f'{b}_dec', 'conv', [up, ptb], 'concat', in_channels=2 * w,
                    out_channels=w, activation='gelu')
        deltas[b] = g.add(f'{b}_head', 'conv', [dec], in_channels=w, out_channels=out_ch[b],
                          zero_init=True)

    delta = g.add('delta', 'op', [deltas['hv'], deltas['i']], 'concat',
                  options={'op': 'identity'})
    g.add('out', 'op', [x, delta], 'add', options={'op': 'identity'})

    return _finish('efficient_hvi', g.nodes, s, colorspace_mode='hvi')


MOBILEIE6_DEFAULTS = {'channels': 32, 'blocks': 2, 'branches': MBR_BRANCHES,
                      'attention': True, 'reduction': 4, 'gate_kernel': 7,
                      'eps': RETINEX_EPS, 'max_params': 1_000_000}


@short_name('mobileie6', MODELS)
def build_mobileie6(cfg=None):
    """Fully convolutional multi-branch backbone with a 6-channel Retinex
    head.

    Every convolution is a reparameterizable multi-branch node (5x5, 3x3,
    1x1, 1x3, 3x1 with batch norm). Channel attention followed by a spatial
    gate modulates the features. The tail predicts 3 illumination and 3
    residual channels, and the output is
    :code:`clamp(x / max(L, eps) - N, 0, 1)`.

    The default of 32 channels and 2 body blocks gives 98,917 parameters in
    training form and 60,623 after reparameterization. Setting
    'attention' to False drops channel attention, which leaves a purely
    local model.
    """
    s = _settings(MOBILEIE6_DEFAULTS, cfg)
    c, branches = s['channels'], tuple(tuple(b) for b in s['branches'])
    g = _GraphBuilder()

    x = g.add('x', 'input')
    feat = g.add('head', 'mbr', [x], in_channels=3, out_channels=c, branches=branches,
                 bias=False, activation='gelu')
    marked = [feat]
    for i in range(s['blocks']):
        feat = g.add(f'body{i + 1}', 'mbr', [feat], in_channels=c, branches=branches,
                     bias=False, activation='gelu')
        marked.append(feat)
    if s['attention']:
        feat = g.add('channel_att', 'ca', [feat], in_channels=c, reduction=s['reduction'])
    feat = g.add('spatial_att', 'spatial_gate', [feat], in_channels=c, kernel=s['gate_kernel'])
    tail = g.add('tail', 'mbr', [feat], in_channels=c, out_channels=6, branches=branches,
                 bias=False)
    marked.append(tail)
    g.add('out', 'op', [x, tail], in_channels=3, out_channels=3,
          options={'op': 'retinex', 'eps': s['eps']})

    return _finish('mobileie6', g.nodes, s, reparam_nodes=tuple(marked))


RETINEX_LITE_DEFAULTS = {'width': 16, 'estimator_width': 16, 'expansion': 2.0,
                         'use_sca': True, 'eps': RETINEX_EPS, 'max_params': 1_000_000}


@short_name('retinex_lite', MODELS)
def build_retinex_lite(cfg=None):
    """Illumination-guided reflectance restoration.

    A shallow estimator predicts an illumination map L in [eps, 1] and a
    learnable global curve turns it into the enhanced illumination. The
    reflectance estimate :code:`x / L` is concatenated with L and restored
    by a two-level encoder-decoder of NAF blocks whose zero-initialized head
    adds a residual. The output is :code:`R * L_enhanced`, so an untrained
    model reproduces its input.
    """
    s = _settings(RETINEX_LITE_DEFAULTS, cfg)
    w, e, eps = s['width'], s['estimator_width'], s['eps']
    naf = {'expansion': s['expansion'], 'use_sca': s['use_sca']}
    g = _GraphBuilder()

    x = g.add('x', 'input')
    est = g.add('est1', 'conv', [x], in_channels=3, out_channels=e, activation='gelu')
    est = g.add('est2', 'conv', [est], in_channels=e, activation='gelu')
    est = g.add('est3', 'conv', [est], in_channels=e, out_channels=1)
    illum = g.add('illum', 'op', [est], in_channels=1, options={'op': 'illumination',
                                                               'eps': eps})
    enhanced = g.add('illum_enh', 'illum_adjust', [illum], in_channels=1,
                     options={'eps': eps})
    refl = g.add('refl_in', 'op', [x, illum], in_channels=3,
                 options={'op': 'divide', 'eps': eps})

    stem = g.add('r_stem', 'conv', [refl, illum], 'concat', in_channels=4, out_channels=w)
    enc1 = g.add('r_enc1', 'naf', [stem], in_channels=w, **naf)
    down1 = g.add('r_down1', 'down', [enc1], in_channels=w, out_channels=2 * w)
    enc2 = g.add('r_enc2', 'naf', [down1], in_channels=2 * w, **naf)
    down2 = g.add('r_down2', 'down', [enc2], in_channels=2 * w, out_channels=4 * w)
    mid = g.add('r_mid', 'naf', [down2], in_channels=4 * w, **naf)
    up2 = g.add('r_up2', 'up', [mid], in_channels=4 * w, out_channels=2 * w)
    fuse2 = g.add('r_fuse2', 'conv', [up2, enc2], 'concat', in_channels=4 * w,
                  out_channels=2 * w, kernel=1)
    dec2 = g.add('r_dec2', 'naf', [fuse2], in_channels=2 * w, **naf)
    up1 = g.add('r_up1', 'up', [dec2], in_channels=2 * w, out_channels=w)
    fuse1 = g.add('r_fuse1', 'conv', [up1, enc1], 'concat', in_channels=2 * w,
                  out_channels=w, kernel=1)
    dec1 = g.add('r_dec1', 'naf', [fuse1], in_channels=w, **naf)
    head = g.add('r_head', 'conv', [dec1], in_channels=w, out_channels=3, zero_init=True)
    restored = g.add('reflectance', 'op', [refl, head], 'add', options={'op': 'identity'})
    g.add('out', 'op', [restored, enhanced], in_channels=3, options={'op': 'multiply'})

    return _finish('retinex_lite', g.nodes, s)


def build_spec(name, cfg=None):
    """ModelSpec of the registered model :code:`name`."""
    return lookup(MODELS, name, 'model')(cfg)


def build_model(name, cfg=None):
    """Instantiated GraphEnhancer of the registered model :code:`name`."""
    return build_spec(name, cfg).instantiate()
