"""Work-efficient inclusive associative scan (up-sweep / down-sweep).

The scan runs level by level over an implicit binary tree. All combines of
one level are independent; they are split into contiguous chunks and handed
to a fixed worker pool, and the level ends when every chunk is done. The tree
depends only on the number of elements, so results do not depend on the
worker count.

Elements come in two flavours:

* a Python sequence, combined pairwise with ``combine(a, b)``;
* a batched pytree (an ndarray or a tuple/NamedTuple of ndarrays sharing a
  leading axis), where ``combine`` receives stacked operands and must return
  the same structure. This is how the Gaussian elements are scanned.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass

import numpy as np

from ..config import default_workers


@dataclass
class ScanStats:
    combine_count: int = 0
    depth: int = 0

    def merge(self, other):
        """Stats of two scans run one after the other."""
        return ScanStats(self.combine_count + other.combine_count,
                         max(self.depth, other.depth))


def depth_bound(n):
    return 2 * math.ceil(math.log2(n)) + 2


class _ListStore:
    def __init__(self, elements):
        self.items = list(elements)

    def __len__(self):
        return len(self.items)

    def reverse(self):
        self.items.reverse()

    def combine_chunk(self, op, left, right):
        items = self.items
        return [op(items[a], items[b]) for a, b in zip(left, right)]

    def write(self, idx, values):
        for i, v in zip(idx, values):
            self.items[i] = v

    def result(self):
        return self.items


class _ArrayStore:
    def __init__(self, elements):
        if isinstance(elements, np.ndarray):
            self.make = lambda leaves: leaves[0]
            leaves = [elements]
        elif hasattr(elements, "_make"):
            self.make = lambda leaves, cls=type(elements): cls._make(leaves)
            leaves = list(elements)
        else:
            self.make = tuple
            leaves = list(elements)
        self.leaves = [np.array(x) for x in leaves]
        sizes = {len(x) for x in self.leaves}
        if len(sizes) != 1:
            raise ValueError("batched elements must share the leading axis length")

    def __len__(self):
        return len(self.leaves[0])

    def reverse(self):
        self.leaves = [np.ascontiguousarray(x[::-1]) for x in self.leaves]

    def combine_chunk(self, op, left, right):
        a = self.make([x[left] for x in self.leaves])
        b = self.make([x[right] for x in self.leaves])
        out = op(a, b)
        return [out] if isinstance(out, np.ndarray) else list(out)

    def write(self, idx, values):
        for leaf, v in zip(self.leaves, values):
            leaf[idx] = v

    def result(self):
        return self.make(self.leaves)


def _is_batched(elements):
    if isinstance(elements, np.ndarray):
        return True
    return isinstance(elements, tuple) and len(elements) > 0 and all(
        isinstance(x, np.ndarray) for x in elements)


def associative_scan(combine, elements, *, reverse=False, workers=None, batched=None,
                     pool=None):
    """All prefix combinations of ``elements`` under the associative ``combine``.

    Forward: ``out[k] = a[0] (x) ... (x) a[k]``. Reverse: ``out[k] = a[k] (x) ...
    (x) a[N-1]``. Returns ``(out, ScanStats)`` in the same container type as
    the input. ``combine`` must be pure; it is called concurrently when
    ``workers > 1``. An existing ``ThreadPoolExecutor`` may be passed as
    ``pool``.
    """
    if batched is None:
        batched = _is_batched(elements)
    store = _ArrayStore(elements) if batched else _ListStore(elements)
    n = len(store)
    if n == 0:
        raise ValueError("associative_scan needs at least one element")
    op = (lambda a, b: combine(b, a)) if reverse else combine
    if reverse:
        store.reverse()
    workers = default_workers() if workers is None else max(1, int(workers))
    stats = ScanStats()

    if pool is not None:
        ctx = nullcontext(pool)
    elif workers > 1:
        ctx = ThreadPoolExecutor(max_workers=workers)
    else:
        ctx = nullcontext(None)

    with ctx as executor:
        def level(left, right):
            if not len(right):
                return
            if executor is None or len(right) == 1:
                results = [store.combine_chunk(op, left, right)]
                parts = [right]
            else:
                bounds = np.linspace(0, len(right), min(workers, len(right)) + 1).astype(int)
                parts = [right[s:e] for s, e in zip(bounds[:-1], bounds[1:])]
                futures = [executor.submit(store.combine_chunk, op, left[s:e], right[s:e])
                           for s, e in zip(bounds[:-1], bounds[1:])]
                results = [f.result() for f in futures]
            # barrier: write only after every chunk of the level has finished
            if batched:
                merged = [np.concatenate([r[i] for r in results]) for i in range(len(results[0]))]
                store.write(right, merged)
            else:
                for idx, vals in zip(parts, results):
                    store.write(idx, vals)
            stats.combine_count += len(right)
            stats.depth += 1

        stride = 1
        while stride < n:
            right = np.arange(2 * stride - 1, n, 2 * stride)
            level(right - stride, right)
            stride *= 2
        stride //= 4
        while stride >= 1:
            src = np.arange(2 * stride - 1, n, 2 * stride)
            dst = src + stride
            keep = dst < n
            level(src[keep], dst[keep])
            stride //= 2

    out = store.result()
    if reverse:
        if batched:
            out = store.make([np.ascontiguousarray(x[::-1]) for x in store.leaves])
        else:
            out = out[::-1]
    return out, stats
