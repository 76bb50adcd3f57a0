"""named-tensor checkpoint container

Layout, all little-endian:

    header   4s magic "ALEI" | u16 version | u32 entry count
    entry    u16 name length | name (utf-8) | u8 dtype | u8 rank | rank * u32 dims | payload

Entries are written in ``state_dict`` order, so saving the same model twice gives identical bytes.
"""
from collections import OrderedDict
import logging
from pathlib import Path
import struct

import numpy as np
import torch

from .errors import ConfigurationError, FormatError

logger = logging.getLogger(__name__)

MAGIC = b'ALEI'
VERSION = 1
HEADER = struct.Struct('<4sHI')
NAME_LEN = struct.Struct('<H')
ENTRY = struct.Struct('<BB')
DIM = struct.Struct('<I')

# dtype code -> (torch dtype, little-endian numpy dtype)
DTYPES = {
    0: (torch.float32, np.dtype('<f4')),
    1: (torch.float64, np.dtype('<f8')),
    2: (torch.int64, np.dtype('<i8')),
}
DTYPE_CODES = {torch_dtype: code for code, (torch_dtype, _) in DTYPES.items()}


def encode_checkpoint(state):
    """bytes of a checkpoint holding every tensor in ``state``

    Parameters
    ----------
    state : Mapping
        of str name -> torch.Tensor, e.g. ``model.state_dict()``
    """
    chunks = [HEADER.pack(MAGIC, VERSION, len(state))]
    for name, tensor in state.items():
        tensor = tensor.detach().cpu().contiguous()
        if tensor.dtype not in DTYPE_CODES:
            raise ConfigurationError(f'cannot save tensor {name} of dtype {tensor.dtype}')
        code = DTYPE_CODES[tensor.dtype]
        encoded_name = name.encode('utf-8')
        chunks.append(NAME_LEN.pack(len(encoded_name)))
        chunks.append(encoded_name)
        chunks.append(ENTRY.pack(code, tensor.dim()))
        chunks.extend(DIM.pack(extent) for extent in tensor.shape)
        chunks.append(tensor.numpy().astype(DTYPES[code][1], copy=False).tobytes())
    return b''.join(chunks)


def decode_checkpoint(buf, path=None):
    """inverse of ``encode_checkpoint``

    Returns
    -------
    state : OrderedDict
        of str name -> torch.Tensor

    Raises
    ------
    FormatError
        naming the byte offset of a bad magic, an unsupported version,
        an unknown dtype, a truncated entry, or trailing bytes
    """
    if len(buf) < len(MAGIC) or buf[:len(MAGIC)] != MAGIC:
        raise FormatError(f'bad magic, expected {MAGIC!r}', offset=0, path=path)
    if len(buf) < HEADER.size:
        raise FormatError(f'truncated header, file has {len(buf)} bytes', offset=len(buf), path=path)
    _, version, count = HEADER.unpack_from(buf, 0)
    if version != VERSION:
        raise FormatError(f'unsupported version {version}, expected {VERSION}', offset=4, path=path)

    def need(offset, n_bytes, what):
        if offset + n_bytes > len(buf):
            raise FormatError(f'truncated {what}', offset=len(buf), path=path)

    state = OrderedDict()
    offset = HEADER.size
    for ind in range(count):
        need(offset, NAME_LEN.size, f'name length of entry {ind} of {count}')
        (name_len,) = NAME_LEN.unpack_from(buf, offset)
        offset += NAME_LEN.size
        need(offset, name_len, f'name of entry {ind} of {count}')
        try:
            name = buf[offset:offset + name_len].decode('utf-8')
        except UnicodeDecodeError:
            raise FormatError(f'name of entry {ind} is not valid utf-8', offset=offset, path=path) from None
        offset += name_len
        need(offset, ENTRY.size, f'header of entry {name}')
        code, rank = ENTRY.unpack_from(buf, offset)
        if code not in DTYPES:
            raise FormatError(f'unknown dtype code {code} for entry {name}', offset=offset, path=path)
        offset += ENTRY.size
        need(offset, rank * DIM.size, f'dims of entry {name}')
        shape = tuple(DIM.unpack_from(buf, offset + i * DIM.size)[0] for i in range(rank))
        offset += rank * DIM.size
        torch_dtype, np_dtype = DTYPES[code]
        n_values = int(np.prod(shape, dtype=np.int64))
        need(offset, n_values * np_dtype.itemsize, f'payload of entry {name}')
        values = np.frombuffer(buf, dtype=np_dtype, count=n_values, offset=offset)
        state[name] = torch.from_numpy(values.astype(np_dtype.newbyteorder('='), copy=True).reshape(shape))
        offset += n_values * np_dtype.itemsize

    if offset != len(buf):
        raise FormatError(f'{len(buf) - offset} trailing bytes after {count} entries', offset=offset, path=path)
    return state


def save_checkpoint(path, state):
    path = Path(path)
    path.write_bytes(encode_checkpoint(state))
    logger.info('saved checkpoint with %d tensors to %s', len(state), path)


def load_checkpoint(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f'checkpoint not found: {path}')
    return decode_checkpoint(path.read_bytes(), path=path)


def select(state, prefixes):
    """entries of ``state`` whose name starts with any of ``prefixes``"""
    prefixes = tuple(prefixes)
    return OrderedDict((name, tensor) for name, tensor in state.items() if name.startswith(prefixes))


def save_model(model, path, prefixes=None):
    """save ``model.state_dict()``, or only the entries under ``prefixes``"""
    state = model.state_dict()
    if prefixes is not None:
        state = select(state, prefixes)
    save_checkpoint(path, state)


@torch.no_grad()
def load_into(model, state, strict=True):
    """copy every tensor of ``state`` into ``model`` in place

    Parameters
    ----------
    model : torch.nn.Module
    state : Mapping
        of str name -> torch.Tensor
    strict : bool
        if True, every entry of ``model.state_dict()`` must be present. Default is True.

    Raises
    ------
    ConfigurationError
        listing entries of ``state`` the model does not have, entries missing
        from ``state`` when ``strict``, or entries whose shapes differ
    """
    own = model.state_dict()
    unknown = sorted(set(state) - set(own))
    if unknown:
        raise ConfigurationError(f'checkpoint has entries the model does not: {unknown}')
    if strict:
        missing = sorted(set(own) - set(state))
        if missing:
            raise ConfigurationError(f'checkpoint is missing entries: {missing}')
    mismatched = [f'{name}: {tuple(state[name].shape)} vs {tuple(own[name].shape)}'
                  for name in state if state[name].shape != own[name].shape]
    if mismatched:
        raise ConfigurationError(f'checkpoint shapes do not match the model: {mismatched}')
    for name, tensor in state.items():
        # state_dict tensors share storage with the parameters and buffers
        own[name].copy_(tensor.to(own[name].dtype))
    return model


def load_model(model, path, strict=True, prefixes=None):
    state = load_checkpoint(path)
    if prefixes is not None:
        state = select(state, prefixes)
    return load_into(model, state, strict=strict)
