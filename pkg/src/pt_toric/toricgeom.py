"""Smooth toric surfaces and the combinatorics of their torus fixed points.

A surface is stored as its cyclic fan.  Vertex ``i`` is the cone spanned by
rays ``u_i, u_{i+1}``; edge ``i`` is the invariant curve of ray ``u_i``.
Chart coordinate 1 at a vertex is the tangent direction of its ``edge1``
(the curve ``{x2 = 0}``), coordinate 2 that of ``edge2``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

__all__ = [
    "NonSmoothFan",
    "NotComplete",
    "Vertex",
    "Edge",
    "ToricSurface",
    "Partition",
    "RayBound",
    "DegreeTuple",
    "FixedPoint",
    "surface_p2",
    "surface_from_fan",
    "load_surface",
    "degree_tuples",
    "ray_bounds",
    "partitions_in_rays",
    "fixed_points",
]


class NonSmoothFan(ValueError):
    pass


class NotComplete(ValueError):
    pass


def _det(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


@dataclass(frozen=True)
class Vertex:
    id: int
    incident_edges: tuple[int, int]
    # columns: torus weights of chart coordinates 1 and 2 in the (t1, t2) basis
    weights: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        if abs(_det(*self.weights)) != 1:
            raise NonSmoothFan(f"vertex {self.id}: chart weights {self.weights} are not unimodular")

    @property
    def w1(self) -> tuple[int, int]:
        return self.weights[0]

    @property
    def w2(self) -> tuple[int, int]:
        return self.weights[1]


@dataclass(frozen=True)
class Edge:
    id: int
    endpoints: tuple[int, int]
    self_intersection: int
    curve_class: tuple[int, ...]

    def __post_init__(self):
        if self.endpoints[0] == self.endpoints[1]:
            raise ValueError(f"edge {self.id} has coincident endpoints")


@dataclass(frozen=True)
class ToricSurface:
    name: str
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    class_rank: int
    rays: tuple[tuple[int, int], ...] | None = None
    # intersection numbers of the basis curves, used for beta.(beta + K)/2
    _adjacency: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for v in self.vertices:
            for e in v.incident_edges:
                if v.id not in self.edges[e].endpoints:
                    raise ValueError(f"vertex {v.id} lists edge {e} which does not end there")
        for e in self.edges:
            for vid in e.endpoints:
                if self.vertices[vid].incident_edges.count(e.id) != 1:
                    raise ValueError(f"edge {e.id} must appear exactly once at vertex {vid}")
            if len(e.curve_class) != self.class_rank:
                raise ValueError(f"edge {e.id}: curve class has wrong length")

    def edge_frame(self, edge_id: int, vertex_id: int) -> tuple[tuple[int, int], tuple[int, int]]:
        """(weight along the edge, transverse weight) in the chart of ``vertex_id``."""
        v = self.vertices[vertex_id]
        if v.incident_edges[0] == edge_id:
            return v.w1, v.w2
        if v.incident_edges[1] == edge_id:
            return v.w2, v.w1
        raise ValueError(f"edge {edge_id} is not incident to vertex {vertex_id}")

    def intersection(self, e: int, f: int) -> int:
        if e == f:
            return self.edges[e].self_intersection
        shared = set(self.edges[e].endpoints) & set(self.edges[f].endpoints)
        return len(shared)

    def class_of(self, d: "DegreeTuple | Sequence[int]") -> tuple[int, ...]:
        degs = d.degrees if isinstance(d, DegreeTuple) else tuple(d)
        out = [0] * self.class_rank
        for e, de in zip(self.edges, degs):
            for k, c in enumerate(e.curve_class):
                out[k] += de * c
        return tuple(out)

    def beta_beta_plus_k_half(self, d: "DegreeTuple | Sequence[int]") -> int:
        """beta.(beta + K_S)/2 for beta = [d], with K_S = -sum of all boundary curves."""
        degs = d.degrees if isinstance(d, DegreeTuple) else tuple(d)
        n = len(self.edges)
        bb = sum(degs[e] * degs[f] * self.intersection(e, f) for e in range(n) for f in range(n))
        kb = -sum(degs[e] * sum(self.intersection(e, f) for f in range(n)) for e in range(n))
        total = bb + kb
        assert total % 2 == 0
        return total // 2

    def representative(self, beta: Sequence[int]) -> "DegreeTuple":
        tuples = degree_tuples(self, beta)
        if not tuples:
            raise ValueError(f"class {tuple(beta)} is not effective on {self.name}")
        return tuples[0]


def _edge_vertex_lists(n: int):
    # vertex i = cone (u_i, u_{i+1}); coordinate 1 is dual to u_i, so it moves
    # along the curve of u_{i+1}: edge1 = i+1, edge2 = i
    incident = [((i + 1) % n, i) for i in range(n)]
    endpoints = [((i - 1) % n, i) for i in range(n)]
    return incident, endpoints


def surface_p2() -> ToricSurface:
    """The projective plane with vertices alpha, beta, gamma = 0, 1, 2.

    Edges: 0 = D_alpha_beta, 1 = D_beta_gamma, 2 = D_gamma_alpha.
    """
    vertices = (
        Vertex(0, (0, 2), ((1, 0), (0, 1))),
        Vertex(1, (1, 0), ((-1, 1), (-1, 0))),
        Vertex(2, (1, 2), ((1, -1), (0, -1))),
    )
    edges = (
        Edge(0, (0, 1), 1, (1,)),
        Edge(1, (1, 2), 1, (1,)),
        Edge(2, (2, 0), 1, (1,)),
    )
    return ToricSurface("p2", vertices, edges, 1, rays=((1, 0), (0, 1), (-1, -1)))


def surface_from_fan(rays: Sequence[Sequence[int]], name: str | None = None) -> ToricSurface:
    rays = tuple((int(r[0]), int(r[1])) for r in rays)
    n = len(rays)
    if n < 3:
        raise NotComplete("a complete fan needs at least three rays")
    for r in rays:
        if math.gcd(*r) != 1:
            raise NonSmoothFan(f"ray {r} is not primitive")
    for i in range(n):
        det = _det(rays[i], rays[(i + 1) % n])
        if det <= 0:
            raise NotComplete(f"rays {rays[i]}, {rays[(i + 1) % n]} are not in counter-clockwise order")
        if det != 1:
            raise NonSmoothFan(f"cone ({rays[i]}, {rays[(i + 1) % n]}) has determinant {det}")
    winding = 0.0
    for i in range(n):
        a, b = rays[i], rays[(i + 1) % n]
        winding += math.atan2(_det(a, b), a[0] * b[0] + a[1] * b[1])
    if abs(winding - 2 * math.pi) > 1e-9:
        raise NotComplete("rays wind around the origin more than once")

    incident, endpoints = _edge_vertex_lists(n)
    vertices = []
    for i in range(n):
        u, v = rays[i], rays[(i + 1) % n]
        # dual basis of (u, v); det(u, v) = 1
        m1 = (v[1], -v[0])
        m2 = (-u[1], u[0])
        vertices.append(Vertex(i, incident[i], (m1, m2)))

    self_int = []
    for i in range(n):
        prev, nxt, u = rays[(i - 1) % n], rays[(i + 1) % n], rays[i]
        s = (prev[0] + nxt[0], prev[1] + nxt[1])
        # s = -m * u
        if u[0]:
            m = -s[0] // u[0]
        else:
            m = -s[1] // u[1]
        assert (s[0] + m * u[0], s[1] + m * u[1]) == (0, 0)
        self_int.append(m)

    # H2 basis: curves of rays 2..n-1; the two linear relations from the dual
    # basis of (u_0, u_1) express D_0 and D_1 in it
    rank = n - 2
    m0 = (rays[1][1], -rays[1][0])
    m1 = (-rays[0][1], rays[0][0])
    classes = []
    for i in range(n):
        if i == 0:
            classes.append(tuple(-(m0[0] * rays[e][0] + m0[1] * rays[e][1]) for e in range(2, n)))
        elif i == 1:
            classes.append(tuple(-(m1[0] * rays[e][0] + m1[1] * rays[e][1]) for e in range(2, n)))
        else:
            classes.append(tuple(1 if e == i else 0 for e in range(2, n)))
    edges = tuple(Edge(i, endpoints[i], self_int[i], classes[i]) for i in range(n))
    return ToricSurface(name or f"fan{list(map(list, rays))}", tuple(vertices), edges, rank, rays=rays)


BUILTINS = {
    "p2": surface_p2,
    "p1xp1": lambda: surface_from_fan([(1, 0), (0, 1), (-1, 0), (0, -1)], name="p1xp1"),
    "f1": lambda: surface_from_fan([(1, 0), (0, 1), (-1, 1), (0, -1)], name="f1"),
    "f2": lambda: surface_from_fan([(1, 0), (0, 1), (-1, 2), (0, -1)], name="f2"),
}


def load_surface(source) -> ToricSurface:
    """Accept a builtin name, a JSON document (dict), or a path to a JSON file."""
    if isinstance(source, ToricSurface):
        return source
    if isinstance(source, (str, Path)) and str(source) in BUILTINS:
        return BUILTINS[str(source)]()
    if isinstance(source, (str, Path)):
        source = json.loads(Path(source).read_text())
    if "builtin" in source:
        name = source["builtin"]
        if name not in BUILTINS:
            raise ValueError(f"unknown builtin surface {name!r}")
        return BUILTINS[name]()
    if "rays" in source:
        return surface_from_fan(source["rays"], name=source.get("name"))
    raise ValueError("surface descriptor needs 'builtin' or 'rays'")


@dataclass(frozen=True, order=True)
class DegreeTuple:
    degrees: tuple[int, ...]

    def __post_init__(self):
        if any(d < 0 for d in self.degrees):
            raise ValueError("degrees must be non-negative")

    def __getitem__(self, e: int) -> int:
        return self.degrees[e]

    def __len__(self):
        return len(self.degrees)

    @property
    def total(self) -> int:
        return sum(self.degrees)


def _ample_class(surface: ToricSurface) -> tuple[int, ...]:
    # H.D_e > 0 for every edge; a small search is enough for hand-sized fans
    n = len(surface.edges)
    for bound in range(1, 8):
        for h in itertools.product(range(bound + 1), repeat=n):
            if all(sum(h[f] * surface.intersection(f, e) for f in range(n)) > 0 for e in range(n)):
                return tuple(sum(h[f] * surface.intersection(f, e) for f in range(n)) for e in range(n))
    raise ValueError("could not find an ample class")


def _normalize_beta(surface: ToricSurface, beta) -> tuple[int, ...]:
    if isinstance(beta, int):
        beta = (beta,)
    beta = tuple(int(b) for b in beta)
    if len(beta) != surface.class_rank:
        raise ValueError(f"class vector must have length {surface.class_rank}")
    return beta


def degree_tuples(surface: ToricSurface, beta) -> list[DegreeTuple]:
    beta = _normalize_beta(surface, beta)
    n = len(surface.edges)
    h_dot = _ample_class(surface)  # H.D_e per edge
    # H.beta via the basis curves (edges 2..n-1 for fans; edge with unit class otherwise)
    h_beta = 0
    basis_edges = []
    for k in range(surface.class_rank):
        for e in surface.edges:
            if e.curve_class == tuple(1 if j == k else 0 for j in range(surface.class_rank)):
                basis_edges.append(e.id)
                break
        else:
            raise ValueError("curve classes do not contain a basis")
    h_beta = sum(b * h_dot[e] for b, e in zip(beta, basis_edges))
    if h_beta < 0:
        return []
    bounds = [h_beta // h_dot[e] for e in range(n)]
    out = []

    def rec(e: int, acc: list, cls: list):
        if e == n:
            if tuple(cls) == beta:
                out.append(DegreeTuple(tuple(acc)))
            return
        used = sum(acc[f] * h_dot[f] for f in range(e))
        for de in range(0, min(bounds[e], (h_beta - used) // h_dot[e]) + 1):
            acc.append(de)
            rec(e + 1, acc, [c + de * k for c, k in zip(cls, surface.edges[e].curve_class)])
            acc.pop()

    rec(0, [], [0] * surface.class_rank)
    return out


@dataclass(frozen=True)
class RayBound:
    a: int  # bound on k2: thickening of the coordinate-1 curve
    b: int  # bound on k1: thickening of the coordinate-2 curve

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("ray bounds are non-negative")

    def contains(self, k1: int, k2: int) -> bool:
        return k1 < self.b or k2 < self.a


def ray_bounds(surface: ToricSurface, d: DegreeTuple, vertex) -> RayBound:
    v = surface.vertices[vertex] if isinstance(vertex, int) else vertex
    e1, e2 = v.incident_edges
    return RayBound(d[e1], d[e2])


@dataclass(frozen=True, order=True)
class Partition:
    """Column heights: ``heights[i]`` boxes (i, 0), ..., (i, heights[i] - 1)."""

    heights: tuple[int, ...] = ()

    def __post_init__(self):
        h = self.heights
        if any(x < 1 for x in h) or any(h[i] < h[i + 1] for i in range(len(h) - 1)):
            raise ValueError(f"invalid column heights {h}")

    @classmethod
    def from_boxes(cls, boxes) -> "Partition":
        boxes = set(boxes)
        cols: dict[int, int] = {}
        for k1, k2 in boxes:
            cols[k1] = max(cols.get(k1, 0), k2 + 1)
        p = cls(tuple(cols[i] for i in range(len(cols))))
        if p.size != len(boxes) or set(p.boxes()) != boxes:
            raise ValueError("box set is not a Young diagram")
        return p

    @property
    def size(self) -> int:
        return sum(self.heights)

    def __len__(self):
        return self.size

    def boxes(self) -> Iterator[tuple[int, int]]:
        for i, h in enumerate(self.heights):
            for j in range(h):
                yield (i, j)

    def transpose(self) -> "Partition":
        if not self.heights:
            return self
        return Partition(tuple(sum(1 for h in self.heights if h > j) for j in range(self.heights[0])))

    def fits(self, bound: RayBound) -> bool:
        return all(h <= bound.a for h in self.heights[bound.b:])

    def to_list(self) -> list[int]:
        return list(self.heights)


def partitions_in_rays(bound: RayBound, m: int) -> list[Partition]:
    """All partitions of ``m`` inside the (a, b)-rays, largest columns first."""
    out: list[Partition] = []
    heights: list[int] = []

    def rec(remaining: int, cap: int):
        if remaining == 0:
            out.append(Partition(tuple(heights)))
            return
        i = len(heights)
        limit = min(cap, remaining)
        if i >= bound.b:
            limit = min(limit, bound.a)
            # every further column is capped by a, so the rest must fit
            if limit == 0:
                return
        for h in range(limit, 0, -1):
            heights.append(h)
            rec(remaining - h, h)
            heights.pop()

    if m < 0:
        return out
    rec(m, m)
    return out


@dataclass(frozen=True)
class FixedPoint:
    degrees: DegreeTuple
    partitions: tuple[Partition, ...]

    @property
    def size(self) -> int:
        return sum(p.size for p in self.partitions)


def fixed_points(surface: ToricSurface, beta, m: int) -> Iterator[FixedPoint]:
    """Every torus-fixed pair with [d] = beta and total length m (brute force)."""
    for d in degree_tuples(surface, beta):
        bounds = [ray_bounds(surface, d, v) for v in surface.vertices]
        for sizes in _compositions(m, len(bounds)):
            choices = [partitions_in_rays(b, k) for b, k in zip(bounds, sizes)]
            for lams in itertools.product(*choices):
                yield FixedPoint(d, tuple(lams))


def _compositions(m: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (m,)
        return
    for k in range(m + 1):
        for rest in _compositions(m - k, parts - 1):
            yield (k,) + rest
