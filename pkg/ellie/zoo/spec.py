""" Classes for describing enhancement models as block graphs."""

# License: BSD 3 clause

import json
import math
import re
from dataclasses import dataclass, field

import networkx as nx

from ellie.blocks import BLOCK_KINDS, BlockConfig, reparameterized_config
from ellie.decorators import lookup
from ellie.errors import ConfigError, ConversionError

COLORSPACE_MODES = ('rgb', 'hvi', 'yuv', 'lab')
MERGES = (None, 'concat', 'add', 'mul')

_NAME = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


@dataclass
class NodeSpec:
    """One node of a model graph.

    Parameters
    ----------
    name: str
        Identifier, unique within the graph.
    kind: str
        Key into BLOCK_KINDS.
    config: BlockConfig
        Block hyper-parameters.
    inputs: tuple of str, default: ()
        Names of the nodes feeding this one, in argument order.
    merge: str, default: None
        How several inputs become one: 'concat' (channels), 'add' or 'mul'.
        None passes them as separate arguments.
    """
    name: str
    kind: str
    config: BlockConfig = field(default_factory=BlockConfig)
    inputs: tuple = ()
    merge: str = None

    def __post_init__(self):
        self.inputs = tuple(self.inputs)

    @property
    def block(self):
        return lookup(BLOCK_KINDS, self.kind, 'block kind')

    def to_dict(self):
        return {'name': self.name, 'kind': self.kind, 'inputs': list(self.inputs),
                'merge': self.merge, 'config': self.config.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(d['name'], d['kind'], BlockConfig.from_dict(d.get('config', {})),
                   tuple(d.get('inputs', ())), d.get('merge'))


@dataclass
class ModelSpec:
    """Enhancement model as a directed acyclic graph of blocks.

    The graph has one 'input' node carrying the (color-converted) image;
    the last node in topological order is the output and must have three
    channels at full resolution. Channel counts along every edge are
    checked on construction, and the learnable-scalar count follows from
    the block configs alone.

    Parameters
    ----------
    name: str
        Model name.
    nodes: list of NodeSpec
        Graph nodes.
    reparam_nodes: tuple of str, default: ()
        Multi-branch nodes to merge for inference.
    colorspace_mode: str, default: 'rgb'
        One of 'rgb', 'hvi', 'yuv', 'lab'. The graph works in this space.
    cfg: dict, default: {}
        Builder settings, kept for reports and checkpoints. 'hvi_k' sets the
        initial collapse strength in 'hvi' mode.
    """
    name: str
    nodes: list = field(default_factory=list)
    reparam_nodes: tuple = ()
    colorspace_mode: str = 'rgb'
    cfg: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = list(self.nodes)
        self.reparam_nodes = tuple(self.reparam_nodes)
        self.validate()

    def validate(self):
        if self.colorspace_mode not in COLORSPACE_MODES:
            raise ConfigError(f"""colorspace_mode must be one of {COLORSPACE_MODES}.""")

        names = [n.name for n in self.nodes]
        for n in self.nodes:
            if not _NAME.match(n.name):
                raise ConfigError(f"""node name '{n.name}' is not an identifier.""")
            lookup(BLOCK_KINDS, n.kind, 'block kind')
            if n.merge not in MERGES:
                raise ConfigError(f"""node '{n.name}': merge must be one of {MERGES}.""")
        if len(set(names)) != len(names):
            raise ConfigError("""node names must be unique.""")

        unknown = [m for m in self.reparam_nodes if m not in names]
        if unknown:
            raise ConfigError(f"""reparam_nodes not in graph: {', '.join(unknown)}.""")

        graph = nx.DiGraph()
        graph.add_nodes_from(names)
        for n in self.nodes:
            for src in n.inputs:
                if src not in graph:
                    raise ConfigError(f"""node '{n.name}' reads unknown node '{src}'.""")
                graph.add_edge(src, n.name)
        if not nx.is_directed_acyclic_graph(graph):
            cycle = ' -> '.join(u for u, _ in nx.find_cycle(graph))
            raise ConfigError(f"""model graph has a cycle: {cycle}.""")
        self.graph = graph

        position = {name: i for i, name in enumerate(names)}
        by_name = {n.name: n for n in self.nodes}
        self.order = [by_name[name] for name in
                      nx.lexicographical_topological_sort(graph, key=position.get)]

        self.channels, self.scales = {}, {}
        if not self.nodes:
            return
        if sum(n.kind == 'input' for n in self.nodes) != 1:
            raise ConfigError("""model graph needs exactly one 'input' node.""")

        for n in self.order:
            ins = [self.channels[i] for i in n.inputs]
            scales = {self.scales[i] for i in n.inputs} or {1.0}
            if len(scales) != 1:
                raise ConfigError(f"""node '{n.name}' mixes resolutions {sorted(scales)}.""")
            if n.merge == 'concat':
                ins = [sum(ins)]
            elif n.merge in ('add', 'mul'):
                if len(set(ins)) != 1:
                    raise ConfigError(f"""node '{n.name}' merges mismatched channels {ins}.""")
                ins = ins[:1]
            if n.kind == 'input':
                ins = []
                if n.config.out_channels != 3:
                    raise ConfigError("""the input node carries 3 channels.""")
            block = n.block
            block.check(n.config, ins)
            self.channels[n.name] = block.out_channels(n.config)
            self.scales[n.name] = scales.pop() * block.scale_factor

        out = self.output
        if self.channels[out] != 3 or self.scales[out] != 1.0:
            raise ConfigError(f"""output node '{out}' must give 3 channels at full"""
                              f""" resolution.""")

    @property
    def output(self):
        return self.order[-1].name if self.order else None

    @property
    def size_multiple(self):
        """Input sides must be multiples of this; enhancers pad to it."""
        if not self.scales:
            return 1
        return int(round(1.0 / min(self.scales.values())))

    @property
    def global_context(self):
        return any(n.block.global_context(n.config) for n in self.nodes)

    def receptive_radius(self):
        """Input-pixel radius bounding every output pixel's dependencies, or
        None when some node looks at the whole image."""
        if self.global_context:
            return None
        radius = {}
        for n in self.order:
            base = max((radius[i] for i in n.inputs), default=0.0)
            scale_in = self.scales[n.inputs[0]] if n.inputs else 1.0
            radius[n.name] = base + n.block.local_radius(n.config) / scale_in
        return int(math.ceil(radius[self.output])) if radius else 0

    def reparameterized(self):
        """Inference form: every marked multi-branch node becomes a single
        convolution with the largest branch kernel."""
        nodes = []
        for n in self.nodes:
            if n.name in self.reparam_nodes:
                if n.kind != 'mbr':
                    raise ConversionError(f"""node '{n.name}' of kind '{n.kind}' cannot"""
                                          f""" be reparameterized.""")
                n = NodeSpec(n.name, 'conv', reparameterized_config(n.config), n.inputs, n.merge)
            nodes.append(n)
        return ModelSpec(self.name, nodes, (), self.colorspace_mode, dict(self.cfg))

    def instantiate(self):
        from ellie.zoo.enhancer import GraphEnhancer
        return GraphEnhancer(self)

    def to_dict(self):
        return {'name': self.name, 'colorspace_mode': self.colorspace_mode,
                'reparam_nodes': list(self.reparam_nodes), 'cfg': self.cfg,
                'nodes': [n.to_dict() for n in self.nodes]}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d['name'], [NodeSpec.from_dict(n) for n in d['nodes']],
                       tuple(d.get('reparam_nodes', ())), d.get('colorspace_mode', 'rgb'),
                       dict(d.get('cfg', {})))
        except (KeyError, TypeError) as e:
            raise ConfigError(f"""malformed model spec: {e}""") from e

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"""model spec is not valid JSON: {e}""") from e
        return cls.from_dict(d)
