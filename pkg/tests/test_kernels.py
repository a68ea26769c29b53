import random
from itertools import combinations

import pytest

from sumset_lab import _kernels, _pykernels


def _ref_best(masks, c):
    best = None
    for idx in combinations(range(len(masks)), min(c, len(masks))):
        acc = 0
        for i in idx:
            acc |= masks[i]
        v = acc.bit_count()
        if best is None or v > best[0]:
            best = (v, idx)
    return best


@pytest.mark.parametrize("seed", range(40))
def test_best_union_matches_reference(backend, seed):
    rng = random.Random(seed)
    k = rng.randint(1, 9)
    width = rng.choice([5, 63, 64, 65, 200])
    masks = [rng.getrandbits(width) for _ in range(k)]
    c = rng.randint(1, k + 1)
    assert _kernels.best_union(masks, c) == _ref_best(masks, c)


def test_target_stops_at_first_lexicographic_hit(backend):
    masks = [0b1, 0b110, 0b111, 0b1000]
    # {0,1} reaches 3 before {0,2} or {1,2}
    assert _kernels.best_union(masks, 2, 3) == (3, (0, 1))


def test_union_sizes(backend):
    assert _kernels.union_sizes(0b1, [0b10, 0b1, 1 << 100]) == [2, 1, 2]


def test_c_at_least_rows_takes_everything(backend):
    assert _kernels.best_union([1, 2, 4], 5) == (3, (0, 1, 2))


def test_invalid_arguments(backend):
    with pytest.raises(ValueError):
        _kernels.best_union([], 1)
    with pytest.raises(ValueError):
        _kernels.best_union([1], 0)


def test_backends_agree_on_large_rows():
    if "cython" not in _kernels.available_backends():
        pytest.skip("compiled kernels not built")
    from sumset_lab import _ckernels

    rng = random.Random(7)
    masks = [rng.getrandbits(3000) for _ in range(12)]
    assert _ckernels.best_union(masks, 3) == _pykernels.best_union(masks, 3)
    assert _ckernels.union_sizes(masks[0], masks) == _pykernels.union_sizes(masks[0], masks)


def test_use_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _kernels.use_backend("fortran")
