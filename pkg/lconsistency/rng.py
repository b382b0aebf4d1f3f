""" Counter-based random substreams:  (seed, replicate, block) -> generator """
import numpy as np
import numpy.random as rnd


def substream_rng(seed: int, *keys: int) -> rnd.Generator:
    """make an rng for the substream identified by `seed` and integer `keys`

    The returned generator depends only on its arguments, never on how many
    other substreams were created before it, e.g. `substream_rng(seed,
    replicate, block)` names one block of draws of one replicate.

    Args:
        seed (int): non-negative scenario seed
        *keys (int): non-negative substream coordinates
    Returns:
        Generator: independent generator for that substream
    """
    if seed < 0 or any(key < 0 for key in keys):
        raise ValueError('seed and substream keys should be non-negative')

    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(keys))
    return rnd.Generator(rnd.PCG64(sequence))
