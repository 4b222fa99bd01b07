"""Derive independent sub-seeds from one master seed.

``derive_seed(master, "split")`` feeds ``numpy.random.SeedSequence`` with the
master seed as entropy and the CRC-32 of each path component as the spawn
key, then takes the first 32-bit word of the generated state. The mapping is
stable across platforms and numpy versions that keep SeedSequence's output.
"""

import zlib

import numpy as np


def derive_seed(master: int, *path) -> int:
    key = tuple(zlib.crc32(str(p).encode("utf-8")) for p in path)
    seq = np.random.SeedSequence(entropy=int(master), spawn_key=key)
    return int(seq.generate_state(1, dtype=np.uint32)[0])
