""" Binary checkpoints with integrity checking.

Layout::

    magic      8 bytes   b'ELLIECKP'
    version    uint16    little endian
    header     uint32    header length in bytes
    payload    uint64    payload length in bytes
    checksum   32 bytes  sha256 of header + payload
    header     UTF-8 JSON: spec, constants, step, precision, tensor table,
               parameter count and budget verdicts
    payload    raw little-endian tensor data in tensor-table order
"""

# License: BSD 3 clause

import hashlib
import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np
import torch

from ellie.errors import IntegrityError, ConfigError
from ellie.zoo import ModelSpec, ParamBudget, audit_budget
from ellie.zoo.budget import BYTES_PER_PARAM

MAGIC = b'ELLIECKP'
VERSION = 1
_PREAMBLE = struct.Struct('<8sHIQ32s')

_STORAGE_DTYPES = {'float32': np.dtype('<f4'), 'float16': np.dtype('<f2')}


@dataclass
class Checkpoint:
    """Model spec, weights and training metadata.

    Parameters
    ----------
    spec: ModelSpec
        Graph the weights belong to.
    state: dict
        Tensor state dict of the instantiated spec.
    step: int, default: 0
        Training step the weights were taken at.
    precision: str, default: 'float32'
        Storage precision of floating point tensors: 'float32' or 'float16'.
    constants: dict, default: {}
        Colorspace and head constants, e.g. the learned HVI collapse
        strength.
    """
    spec: ModelSpec
    state: dict
    step: int = 0
    precision: str = 'float32'
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.precision not in _STORAGE_DTYPES:
            raise ConfigError(f"""precision must be one of {sorted(_STORAGE_DTYPES)}.""")

    @classmethod
    def from_model(cls, model, step=0, precision='float32'):
        """Snapshot a GraphEnhancer."""
        constants = {'colorspace_mode': model.spec.colorspace_mode}
        if model.colorspace is not None:
            constants['hvi_k'] = float(model.colorspace.k)
        state = {k: v.detach().cpu().clone() for k, v in model.state_dict().items()}
        return cls(model.spec, state, step, precision, constants)

    @property
    def param_count(self):
        return sum(p.numel() for p in self.build_model().parameters())

    def build_model(self):
        """Instantiate the spec, load the weights and switch to eval mode."""
        model = self.spec.instantiate()
        reference = model.state_dict()
        state = {k: v.to(reference[k].dtype) if k in reference else v
                 for k, v in self.state.items()}
        model.load_state_dict(state)
        return model.eval()


def _tensor_bytes(tensor, precision):
    arr = tensor.detach().cpu().numpy()
    if np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(_STORAGE_DTYPES[precision])
    else:
        arr = arr.astype(arr.dtype.newbyteorder('<'))
    return np.ascontiguousarray(arr)


def save_checkpoint(ckpt, path, budget=None):
    """Write :code:`ckpt` to :code:`path`.

    Parameters
    ----------
    ckpt: Checkpoint
        Checkpoint to write.
    path: str
        Output file.
    budget: ParamBudget, default: None
        Limits for the audit; defaults to :code:`ParamBudget` at the
        checkpoint's precision.

    Returns
    -------
    report: dict
        :code:`file_bytes`, :code:`payload_bytes`, :code:`param_count` and
        the budget verdicts.
    """
    budget = budget or ParamBudget(precision=ckpt.precision)
    audit = audit_budget(ckpt.spec, budget)

    table, chunks, offset = [], [], 0
    for name, tensor in ckpt.state.items():
        arr = _tensor_bytes(tensor, ckpt.precision)
        raw = arr.tobytes()
        table.append({'name': name, 'shape': list(arr.shape), 'dtype': arr.dtype.str,
                      'offset': offset, 'nbytes': len(raw)})
        chunks.append(raw)
        offset += len(raw)
    payload = b''.join(chunks)

    header = json.dumps({
        'spec': ckpt.spec.to_dict(),
        'step': int(ckpt.step),
        'precision': ckpt.precision,
        'constants': ckpt.constants,
        'tensors': table,
        'param_count': audit.total_params,
        'budget': {k: v for k, v in audit.to_dict().items() if k != 'per_node'},
    }).encode('utf-8')

    checksum = hashlib.sha256(header + payload).digest()
    with open(path, 'wb') as f:
        f.write(_PREAMBLE.pack(MAGIC, VERSION, len(header), len(payload), checksum))
        f.write(header)
        f.write(payload)

    return {'path': path, 'file_bytes': os.path.getsize(path), 'payload_bytes': len(payload),
            'param_count': audit.total_params,
            'param_payload_bytes': audit.total_params * BYTES_PER_PARAM[ckpt.precision],
            'params_ok': audit.params_ok, 'bytes_ok': audit.bytes_ok, 'passed': audit.passed,
            'messages': list(audit.messages)}


def load_checkpoint(path):
    """Read and verify a checkpoint written by :code:`save_checkpoint`.

    Raises
    ------
    IntegrityError
        Bad magic or version, truncated file, checksum mismatch or an
        inconsistent tensor table.
    """
    with open(path, 'rb') as f:
        data = f.read()
    if len(data) < _PREAMBLE.size:
        raise IntegrityError(f"""'{path}' is truncated.""")
    magic, version, header_len, payload_len, checksum = _PREAMBLE.unpack_from(data)
    if magic != MAGIC:
        raise IntegrityError(f"""'{path}' is not an ellie checkpoint.""")
    if version != VERSION:
        raise IntegrityError(f"""unsupported checkpoint version {version}.""")
    body = data[_PREAMBLE.size:]
    if len(body) != header_len + payload_len:
        raise IntegrityError(f"""'{path}' is truncated or has trailing bytes.""")
    if hashlib.sha256(body).digest() != checksum:
        raise IntegrityError(f"""checksum mismatch in '{path}'.""")

    try:
        header = json.loads(body[:header_len].decode('utf-8'))
        payload = body[header_len:]
        state = {}
        for entry in header['tensors']:
            raw = payload[entry['offset']:entry['offset'] + entry['nbytes']]
            arr = np.frombuffer(raw, dtype=np.dtype(entry['dtype'])).reshape(entry['shape'])
            state[entry['name']] = torch.from_numpy(arr.copy())
        spec = ModelSpec.from_dict(header['spec'])
    except (KeyError, ValueError, TypeError) as e:
        raise IntegrityError(f"""malformed checkpoint header in '{path}': {e}""") from e
    return Checkpoint(spec, state, header['step'], header['precision'], header['constants'])
