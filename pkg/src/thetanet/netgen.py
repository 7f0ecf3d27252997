"""Configuration-model random graphs with prescribed degree sequences.

Stub matching followed by degree-preserving swap repair of self and duplicate
edges. Directed graphs serve synaptically coupled networks (adjacency rows are
in-neighbor lists); undirected graphs serve gap-junction coupling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .distributions import DegreeDistribution
from .errors import NumericalError

RESAMPLE_CAP = 10_000
SWAP_CAP = 100_000


@dataclass(frozen=True)
class Network:
    """Sparse adjacency with per-node degrees.

    adjacency[i, j] counts edges j -> i, so row i holds the in-neighbors of i
    (symmetric for undirected graphs). Entries exceeding 1 or a nonzero
    diagonal can only occur on raw configuration-model output, before repair.
    """

    directed: bool
    adjacency: sp.csr_matrix

    def __post_init__(self):
        a = self.adjacency
        if a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError("adjacency must be square and non-empty")
        if not self.directed:
            if (a != a.T).nnz != 0:
                raise ValueError("undirected adjacency must be symmetric")

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def in_degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel().astype(int)

    @property
    def out_degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=0)).ravel().astype(int)

    @property
    def degrees(self) -> np.ndarray:
        if self.directed:
            raise ValueError("directed network has in_degrees and out_degrees")
        return self.in_degrees

    @property
    def edge_count(self) -> int:
        m = int(self.adjacency.sum())
        return m if self.directed else m // 2

    @property
    def mean_degree(self) -> float:
        # directed: mean in-degree (= mean out-degree); undirected: mean degree
        return float(self.adjacency.sum()) / self.n if self.directed \
            else float(self.in_degrees.mean())

    def is_simple(self) -> bool:
        a = self.adjacency
        return bool((a.data <= 1).all()) and a.diagonal().sum() == 0

    def in_neighbors(self, i: int) -> np.ndarray:
        row = self.adjacency.getrow(i)
        return np.repeat(row.indices, row.data.astype(int))

    def edge_array(self) -> np.ndarray:
        """Edges as (src, dst) rows; undirected edges appear once with src < dst."""
        coo = self.adjacency.tocoo()
        src = np.repeat(coo.col, coo.data.astype(int))
        dst = np.repeat(coo.row, coo.data.astype(int))
        if not self.directed:
            keep = src < dst
            src, dst = src[keep], dst[keep]
        order = np.lexsort((dst, src))
        return np.column_stack([src[order], dst[order]])


def sample_degree_sequences(p_in: DegreeDistribution, p_out: DegreeDistribution,
                            n: int, rng: np.random.Generator,
                            max_tries: int = RESAMPLE_CAP,
                            repair: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Integer in-/out-degree sequences of equal sum, by resampling both lists.

    With repair=True a failed resampling loop is rescued by adding the final
    deficit to one randomly chosen degree, provided the result stays inside the
    law's support.
    """
    if n < 1:
        raise ValueError("need n >= 1 nodes")
    kin = kout = None
    for _ in range(max_tries):
        kin = p_in.sample(n, rng, integer=True)
        kout = p_out.sample(n, rng, integer=True)
        if kin.sum() == kout.sum():
            return kin, kout
    if repair:
        deficit = int(kin.sum() - kout.sum())
        lo, hi = p_out.bounds
        for _ in range(max_tries):
            j = int(rng.integers(n))
            if lo <= kout[j] + deficit <= hi and kout[j] + deficit > 0:
                kout = kout.copy()
                kout[j] += deficit
                return kin, kout
        raise NumericalError("degree-sum repair found no adjustable degree")
    raise NumericalError(
        f"in/out degree sums differ after {max_tries} resamples; "
        "widen a distribution or pass repair=True")


def _stub_match(rng: np.random.Generator, kin: np.ndarray, kout: np.ndarray,
                directed: bool) -> tuple[np.ndarray, np.ndarray]:
    if directed:
        src = np.repeat(np.arange(len(kout)), kout)
        dst = np.repeat(np.arange(len(kin)), kin)
        rng.shuffle(dst)
        return src, dst
    stubs = np.repeat(np.arange(len(kin)), kin)
    rng.shuffle(stubs)
    return stubs[0::2], stubs[1::2]


def _edges_to_network(src, dst, n, directed) -> Network:
    data = np.ones(len(src))
    if directed:
        a = sp.csr_matrix((data, (dst, src)), shape=(n, n))
    else:
        rows = np.concatenate([dst, src])
        cols = np.concatenate([src, dst])
        a = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    a.sum_duplicates()
    return Network(directed=directed, adjacency=a)


def configuration_model(in_degrees=None, out_degrees=None, degrees=None,
                        rng: np.random.Generator | None = None) -> Network:
    """Raw stub-matching graph realizing the degree sequence; may contain defects.

    Directed when in_degrees/out_degrees are given (sums must match);
    undirected when degrees is given (sum must be even).
    """
    if rng is None:
        rng = np.random.default_rng()
    if degrees is not None:
        k = np.asarray(degrees, dtype=int)
        if k.sum() % 2:
            raise ValueError("undirected degree sum must be even")
        src, dst = _stub_match(rng, k, k, directed=False)
        return _edges_to_network(src, dst, len(k), directed=False)
    kin = np.asarray(in_degrees, dtype=int)
    kout = np.asarray(out_degrees, dtype=int)
    if kin.sum() != kout.sum():
        raise ValueError("in- and out-degree sums must match")
    src, dst = _stub_match(rng, kin, kout, directed=True)
    return _edges_to_network(src, dst, len(kin), directed=True)


def _repair_edges(rng, src, dst, n, directed, max_swaps):
    """Swap away self loops and duplicates, committing only strict improvements."""
    src = src.astype(np.int64).copy()
    dst = dst.astype(np.int64).copy()
    m = len(src)

    def canon(a, b):
        if directed:
            return a * n + b
        return (a * n + b) if a < b else (b * n + a)

    seen: dict[int, int] = {}
    keys = np.empty(m, dtype=np.int64)
    for i in range(m):
        keys[i] = canon(src[i], dst[i])
        seen[keys[i]] = seen.get(keys[i], 0) + 1
    first: set[int] = set()
    bad = []
    for i in range(m):
        if src[i] == dst[i]:
            bad.append(i)
        elif seen[keys[i]] > 1 and keys[i] in first:
            bad.append(i)
        else:
            first.add(keys[i])

    swaps = 0
    while bad and swaps < max_swaps:
        still = []
        rng.shuffle(bad)
        for i in bad:
            j = int(rng.integers(m))
            swaps += 1
            a, b = src[i], dst[i]
            c, d = src[j], dst[j]
            k1, k2 = canon(a, d), canon(c, b)
            if i == j or a == d or c == b or seen.get(k1, 0) > 0 or seen.get(k2, 0) > 0:
                still.append(i)
                continue
            seen[keys[i]] -= 1
            seen[keys[j]] -= 1
            dst[i], dst[j] = d, b
            keys[i], keys[j] = k1, k2
            seen[k1] = seen.get(k1, 0) + 1
            seen[k2] = seen.get(k2, 0) + 1
        bad = still
    if bad:
        raise NumericalError(
            f"defect repair stalled after {swaps} swaps with {len(bad)} defects left")
    return src, dst


def repair_defects(net: Network, rng: np.random.Generator,
                   max_swaps: int = SWAP_CAP) -> Network:
    """Rewire self loops and duplicate edges away, keeping every degree fixed."""
    if net.is_simple():
        return net
    edges = net.edge_array()
    src, dst = _repair_edges(rng, edges[:, 0], edges[:, 1], net.n,
                             net.directed, max_swaps)
    out = _edges_to_network(src, dst, net.n, net.directed)
    if not out.is_simple():
        raise NumericalError("repair left a non-simple graph")
    return out


def generate_network(p_in: DegreeDistribution, p_out: DegreeDistribution | None,
                     n: int, rng: np.random.Generator) -> Network:
    """Sampled degree sequences + configuration model + repair, in one call.

    p_out=None builds an undirected network from p_in alone.
    """
    if p_out is None:
        k = p_in.sample(n, rng, integer=True)
        if k.sum() % 2:
            # flip one degree by 1 within support to make the stub count even
            lo, hi = p_in.bounds
            for _ in range(RESAMPLE_CAP):
                j = int(rng.integers(n))
                delta = 1 if k[j] + 1 <= hi else -1
                if lo <= k[j] + delta and k[j] + delta > 0:
                    k[j] += delta
                    break
        net = configuration_model(degrees=k, rng=rng)
    else:
        kin, kout = sample_degree_sequences(p_in, p_out, n, rng)
        net = configuration_model(in_degrees=kin, out_degrees=kout, rng=rng)
    return repair_defects(net, rng)


def save_edge_list(net: Network, path) -> None:
    """Text export: header line `# n=<n> directed=<0|1>`, then `src dst` rows."""
    edges = net.edge_array()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# n={net.n} directed={int(net.directed)}\n")
        for a, b in edges:
            fh.write(f"{a} {b}\n")


def load_edge_list(path) -> Network:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        fields = dict(part.split("=") for part in header.lstrip("# ").split())
        n = int(fields["n"])
        directed = bool(int(fields["directed"]))
        pairs = [line.split() for line in fh if line.strip()]
    if pairs:
        edges = np.asarray(pairs, dtype=np.int64)
        src, dst = edges[:, 0], edges[:, 1]
    else:
        src = dst = np.empty(0, dtype=np.int64)
    return _edges_to_network(src, dst, n, directed)
