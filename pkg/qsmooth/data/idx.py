"""
Reader and writer for the IDX binary format of the MNIST distribution, and the
balanced two-digit MNIST subset.

Layout: a big-endian 32-bit magic number (0x00000803 for uint8 images,
0x00000801 for uint8 labels), one big-endian 32-bit size per dimension, then
the raw bytes. Files ending in ``.gz`` are read and written compressed.
"""
import gzip
import logging
import os
import struct

import numpy as np

from .datasets import Dataset

__all__ = ['IDXFormatError', 'IMAGE_MAGIC', 'LABEL_MAGIC', 'read_idx', 'write_idx',
           'mnist_binary']

log = logging.getLogger(__name__)

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049
UBYTE_CODE = 0x08


class IDXFormatError(ValueError):

    def __init__(self, message, filename, expected=None, found=None):
        self.message = message
        self.filename = filename
        self.expected = expected
        self.found = found

    def __str__(self):
        s = '%s in %s' % (self.message, self.filename)
        if self.expected is not None:
            s += ' (expected %s, found %s)' % (self.expected, self.found)
        return s


def _open(path, mode):
    return gzip.open(path, mode) if str(path).endswith('.gz') else open(path, mode)


def read_idx(path, magic=None):
    """Read an unsigned-byte IDX file into a uint8 array.

    Parameters
    ----------
    path : str
        file name; ``.gz`` files are decompressed
    magic : int, optional
        required magic number (2051 images, 2049 labels)
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"IDX file {path} does not exist")
    with _open(path, 'rb') as f:
        data = f.read()
    if len(data) < 4:
        raise IDXFormatError('File too short for an IDX header', path)
    (found,) = struct.unpack('>I', data[:4])
    if magic is not None and found != magic:
        raise IDXFormatError('Unexpected magic number', path, hex(magic), hex(found))
    if (found >> 8) != UBYTE_CODE or (found >> 16) != 0:
        raise IDXFormatError('Only unsigned-byte IDX files are supported', path,
                             hex(UBYTE_CODE), hex(found >> 8))
    ndim = found & 0xFF
    header = 4 + 4 * ndim
    if len(data) < header:
        raise IDXFormatError('Truncated IDX header', path)
    shape = struct.unpack('>' + 'I' * ndim, data[4:header])
    count = int(np.prod(shape))
    if len(data) - header != count:
        raise IDXFormatError('Payload size does not match the header', path, count,
                             len(data) - header)
    return np.frombuffer(data, dtype=np.uint8, offset=header).reshape(shape)


def write_idx(path, array):
    """Write a uint8 array as an IDX file (compressed when ``path`` ends in .gz)."""
    a = np.asarray(array)
    if a.ndim < 1 or a.ndim > 255:
        raise ValueError(f"IDX arrays need 1 to 255 dimensions, got {a.ndim}")
    if a.size and (a.min() < 0 or a.max() > 255):
        raise ValueError("IDX unsigned-byte arrays must hold values in [0, 255]")
    header = struct.pack('>I', (UBYTE_CODE << 8) | a.ndim)
    header += struct.pack('>' + 'I' * a.ndim, *a.shape)
    with _open(path, 'wb') as f:
        f.write(header + a.astype(np.uint8).tobytes())
    return path


def mnist_binary(images_path, labels_path, digits=(0, 1), per_class=100, seed=0):
    """Balanced two-digit subset of MNIST with pixels scaled to [0, 1].

    The first digit of ``digits`` becomes label 0, the second label 1; each
    class contributes ``per_class`` randomly chosen images (flattened).
    """
    if len(digits) != 2 or digits[0] == digits[1]:
        raise ValueError(f"Need two distinct digits, got {digits}")
    images = read_idx(images_path, IMAGE_MAGIC)
    labels = read_idx(labels_path, LABEL_MAGIC)
    if images.shape[0] != labels.shape[0]:
        raise IDXFormatError('Image and label counts differ', labels_path, images.shape[0],
                             labels.shape[0])
    rng = np.random.default_rng(seed)
    chosen = []
    for digit in digits:
        idx = np.flatnonzero(labels == digit)
        if idx.size < per_class:
            raise ValueError(f"Only {idx.size} images of digit {digit}, need {per_class}")
        chosen.append(np.sort(rng.choice(idx, per_class, replace=False)))
    idx = np.concatenate(chosen)
    points = images[idx].reshape(idx.size, -1).astype(float) / 255.0
    y = (labels[idx] == digits[1]).astype(int)
    order = rng.permutation(idx.size)
    log.info('mnist_binary: %d images of digits %s', idx.size, digits)
    return Dataset(points[order], y[order], seed=seed)
