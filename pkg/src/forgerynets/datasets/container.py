"""binary dataset container

Layout, all little-endian:

    header   4s magic "ALDS" | u16 version | u32 sample count | u8 reserved flags
    record   u8 label | u8 family | u16 C | u16 H | u16 W | C*H*W float32

so a file holds 11 + sum(8 + 4 C H W) bytes.
"""
import logging
from pathlib import Path
import struct

import numpy as np

from ..errors import DataError, FormatError
from .records import Family, SampleRecord

logger = logging.getLogger(__name__)

MAGIC = b'ALDS'
VERSION = 1
HEADER = struct.Struct('<4sHIB')
RECORD = struct.Struct('<BBHHH')
MAX_EXTENT = 2 ** 16 - 1


def dataset_nbytes(shapes):
    """size in bytes of a file holding records with the given (C, H, W) shapes"""
    return HEADER.size + sum(RECORD.size + 4 * int(np.prod(shape)) for shape in shapes)


def write_dataset(path, samples):
    """write ``samples`` to ``path``

    Parameters
    ----------
    path : str, Path
    samples : sequence
        of SampleRecord
    """
    samples = list(samples)
    chunks = [HEADER.pack(MAGIC, VERSION, len(samples), 0)]
    for ind, sample in enumerate(samples):
        c, h, w = sample.image.shape
        if max(c, h, w) > MAX_EXTENT:
            raise DataError(f'sample {ind} has extents {sample.image.shape}, larger than {MAX_EXTENT}')
        chunks.append(RECORD.pack(sample.label, int(sample.family), c, h, w))
        chunks.append(sample.image.astype('<f4', copy=False).tobytes())
    path = Path(path)
    with path.open('wb') as fp:
        for chunk in chunks:
            fp.write(chunk)
    logger.info('wrote %d samples to %s', len(samples), path)


def read_dataset(path):
    """read every record from ``path``

    Returns
    -------
    samples : list
        of SampleRecord

    Raises
    ------
    FormatError
        naming the byte offset of a bad magic, an unsupported version,
        a truncated header or record, or trailing bytes
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f'dataset file not found: {path}')
    buf = path.read_bytes()

    if len(buf) < len(MAGIC) or buf[:len(MAGIC)] != MAGIC:
        raise FormatError(f'bad magic, expected {MAGIC!r}', offset=0, path=path)
    if len(buf) < HEADER.size:
        raise FormatError(f'truncated header, file has {len(buf)} bytes', offset=len(buf), path=path)
    _, version, count, _ = HEADER.unpack_from(buf, 0)
    if version != VERSION:
        raise FormatError(f'unsupported version {version}, expected {VERSION}', offset=4, path=path)

    samples = []
    offset = HEADER.size
    for ind in range(count):
        if offset + RECORD.size > len(buf):
            raise FormatError(f'truncated header of record {ind} of {count}', offset=offset, path=path)
        label, family, c, h, w = RECORD.unpack_from(buf, offset)
        payload_start = offset + RECORD.size
        n_values = c * h * w
        payload_end = payload_start + 4 * n_values
        if payload_end > len(buf):
            raise FormatError(
                f'truncated payload of record {ind} of {count}, expected {4 * n_values} bytes',
                offset=len(buf), path=path
            )
        if label not in (0, 1) or family not in Family._value2member_map_:
            raise FormatError(f'invalid label {label} or family {family} in record {ind}', offset=offset, path=path)
        image = np.frombuffer(buf, dtype='<f4', count=n_values, offset=payload_start)
        image = image.astype(np.float32).reshape(c, h, w)
        try:
            samples.append(SampleRecord(label=label, family=family, image=image))
        except DataError as e:
            raise FormatError(f'record {ind}: {e}', offset=offset, path=path) from None
        offset = payload_end

    if offset != len(buf):
        raise FormatError(f'{len(buf) - offset} trailing bytes after {count} records', offset=offset, path=path)
    return samples
