"""Counter-based random streams keyed by ``(seed, stream index)``.

Each path (or bootstrap task) gets its own Philox generator whose 128-bit key
packs the master seed and the stream index; the step within the stream is the
Philox counter. Output therefore does not depend on how work is scheduled.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for stream ``index`` under master ``seed``."""
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be non-negative")
    key = ((int(index) & _MASK64) << 64) | (int(seed) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, *labels) -> int:
    """Deterministic 64-bit child seed from a master seed and integer/str labels."""
    words = [int(seed) & _MASK64]
    for lab in labels:
        if isinstance(lab, str):
            words.extend(lab.encode())
        else:
            words.append(int(lab) & _MASK64)
    return int(np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)[0])
