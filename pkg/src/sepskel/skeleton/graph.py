"""Skeleton graph from packed separators: regions, nodes, adjacency, stars."""

import json
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from ..errors import NoRegions
from ..geodesic import multi_source_voronoi

MAX_CLIQUE = 8


@dataclass
class SkeletonGraph:
    """Curve skeleton with its surface partition.

    Attributes
    ----------
    positions : ndarray, shape (K, 3)
        Node positions; star centers are appended after region nodes.
    edges : ndarray, shape (E, 2)
        Undirected edges, ``i < j``, sorted.
    region_of_vertex : ndarray, shape (V,)
        Region node of each surface vertex, ``-1`` on separator vertices.
    node_of_vertex : ndarray, shape (V,)
        Region node of every vertex, separator vertices included (nearest
        region by graph distance).
    region_vertices, region_areas : ndarray, shape (K,)
        Vertex count and surface area per node (0 for star centers).
    is_star : ndarray of bool, shape (K,)
    """

    positions: np.ndarray
    edges: np.ndarray
    region_of_vertex: np.ndarray
    node_of_vertex: np.ndarray = field(repr=False)
    region_vertices: np.ndarray = field(repr=False)
    region_areas: np.ndarray = field(repr=False)
    is_star: np.ndarray = field(repr=False)

    @property
    def n_nodes(self):
        return len(self.positions)

    @property
    def n_edges(self):
        return len(self.edges)

    def adjacency(self):
        n = self.n_nodes
        e = self.edges
        A = sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)) if len(e) else sparse.coo_matrix((n, n))
        return (A + A.T).tocsr()

    def n_components(self):
        return int(csgraph.connected_components(self.adjacency(), directed=False)[0])

    def cycle_rank(self):
        """``E - V + C``: number of independent cycles."""
        return self.n_edges - self.n_nodes + self.n_components()

    def triangles(self):
        return find_triangles(self.n_nodes, self.edges)

    def write_obj(self, path):
        with open(path, "w") as fh:
            for p in self.positions:
                fh.write("v %r %r %r\n" % (float(p[0]), float(p[1]), float(p[2])))
            for a, b in self.edges:
                fh.write(f"l {a + 1} {b + 1}\n")

    def to_dict(self):
        return {
            "format": "sepskel-regions",
            "version": 1,
            "nodes": [
                {
                    "id": i,
                    "position": [float(x) for x in self.positions[i]],
                    "region_vertices": int(self.region_vertices[i]),
                    "region_area": float(self.region_areas[i]),
                    "star": bool(self.is_star[i]),
                }
                for i in range(self.n_nodes)
            ],
            "edges": [[int(a), int(b)] for a, b in self.edges],
            "region_of_vertex": [int(x) for x in self.region_of_vertex],
            "node_of_vertex": [int(x) for x in self.node_of_vertex],
        }

    def write_regions(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=1)
            fh.write("\n")


def _canonical_edges(edges):
    e = np.asarray(sorted({(min(a, b), max(a, b)) for a, b in edges if a != b}), dtype=np.int64)
    return e.reshape(-1, 2)


def find_triangles(n, edges):
    nb = [set() for _ in range(n)]
    for a, b in edges:
        nb[a].add(b)
        nb[b].add(a)
    out = []
    for a, b in edges:
        lo, hi = min(a, b), max(a, b)
        for c in sorted(nb[lo] & nb[hi]):
            if c > hi:
                out.append((lo, hi, c))
    return out


def maximal_cliques(n, edges):
    """All maximal cliques as sorted tuples, largest first."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from((int(a), int(b)) for a, b in edges)
    return sorted((tuple(sorted(c)) for c in nx.find_cliques(g)), key=lambda c: (-len(c), c))


def cliques_to_stars(positions, edges, max_clique=MAX_CLIQUE):
    """Replace every clique of three or more nodes by a star around its centroid.

    Repeats until the graph is triangle free.  Cliques larger than
    ``max_clique`` are split by handling their first ``max_clique`` members
    and iterating.

    Returns
    -------
    positions, edges, is_star
    """
    pos = [np.asarray(p, dtype=np.float64) for p in positions]
    n0 = len(pos)
    E = {(min(a, b), max(a, b)) for a, b in edges if a != b}
    while True:
        cliques = [c for c in maximal_cliques(len(pos), sorted(E)) if len(c) >= 3]
        if not cliques:
            break
        for c in cliques:
            c = c[:max_clique]
            pairs = [(a, b) for i, a in enumerate(c) for b in c[i + 1:]]
            if not all(p in E for p in pairs):
                continue
            center = len(pos)
            pos.append(np.mean([pos[v] for v in c], axis=0))
            E.difference_update(pairs)
            E.update((v, center) for v in c)
    is_star = np.zeros(len(pos), dtype=bool)
    is_star[n0:] = True
    return np.asarray(pos).reshape(-1, 3), _canonical_edges(E), is_star


def region_labels(domain, separators, min_region=3):
    """Partition vertices into regions cut out by the separators.

    Regions are the connected components left after deleting every
    separator vertex; components under ``min_region`` vertices count as part
    of the cut.  The cut itself splits into clusters of touching separator
    bands, and all regions bordering one cluster are pairwise adjacent.

    Returns
    -------
    region_of_vertex : ndarray
        Region per vertex, ``-1`` on separator vertices.
    node_of_vertex : ndarray
        Region per vertex with separator vertices assigned to the nearest
        region by graph distance.
    edges : ndarray, shape (E, 2)
        Adjacent region pairs.
    """
    n = domain.n_vertices
    g = domain.graph
    sep = np.zeros(n, dtype=bool)
    for s in separators:
        sep[s.vertices] = True
    keep = np.flatnonzero(~sep)
    if keep.size == 0:
        raise NoRegions("separators cover every vertex")
    ncomp, lab = csgraph.connected_components(g[keep][:, keep], directed=False)
    sizes = np.bincount(lab, minlength=ncomp)
    big = np.flatnonzero(sizes >= min_region)
    if big.size == 0:
        big = np.array([int(np.argmax(sizes))])
    # number regions by their smallest vertex id for a stable ordering
    first = np.array([keep[lab == c].min() for c in big])
    big = big[np.argsort(first)]
    remap = np.full(ncomp, -1, dtype=np.int64)
    remap[big] = np.arange(len(big))
    comp = np.full(n, -1, dtype=np.int64)
    comp[keep] = remap[lab]

    cut = np.flatnonzero(comp < 0)
    _, cluster = csgraph.connected_components(g[cut][:, cut], directed=False)
    cl = np.full(n, -1, dtype=np.int64)
    cl[cut] = cluster
    coo = g.tocoo()
    touch = (cl[coo.row] >= 0) & (comp[coo.col] >= 0)
    contacts = {}
    for c, r in set(zip(cl[coo.row[touch]].tolist(), comp[coo.col[touch]].tolist())):
        contacts.setdefault(c, []).append(r)
    pairs = []
    for rs in contacts.values():
        rs = sorted(rs)
        pairs.extend((a, b) for i, a in enumerate(rs) for b in rs[i + 1:])

    sites = [np.flatnonzero(comp == r) for r in range(len(big))]
    node, _ = multi_source_voronoi(domain, sites)
    region = np.where(sep, -1, node)
    return region, node, _canonical_edges(pairs)


def build_skeleton(domain, separators, min_region=3):
    """Skeleton graph of the regions cut out by non-overlapping separators.

    Raises
    ------
    NoRegions
        ``separators`` is empty.
    """
    if not separators:
        raise NoRegions("no separators to build regions from")
    region, node, edges = region_labels(domain, separators, min_region)
    k = int(node.max()) + 1
    areas_pt = domain.point_areas
    inner = region >= 0
    counts = np.bincount(region[inner], minlength=k)
    areas = np.bincount(region[inner], weights=areas_pt[inner], minlength=k)
    pos = np.zeros((k, 3))
    for d in range(3):
        pos[:, d] = np.bincount(region[inner], weights=areas_pt[inner] * domain.positions[inner, d], minlength=k)
    pos /= np.maximum(areas, 1e-300)[:, None]

    positions, edges, is_star = cliques_to_stars(pos, edges)
    extra = len(positions) - k
    return SkeletonGraph(
        positions=positions,
        edges=edges,
        region_of_vertex=region,
        node_of_vertex=node,
        region_vertices=np.concatenate([counts, np.zeros(extra, dtype=np.int64)]),
        region_areas=np.concatenate([areas, np.zeros(extra)]),
        is_star=is_star,
    )
