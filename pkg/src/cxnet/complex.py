"""Combinatorial regular cell complexes, oriented or unoriented.

A complex is stored as its signed boundary lists.  Everything else
(cofacets, adjacency, coadjacency, the shared-cell sets ``CO`` / ``C``) is
derived from them once at construction time.  Cells are ordered
dimension-major, then by insertion order; every matrix index in the package
is taken from that canonical order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    CxnError,
    CycleTooShort,
    DanglingFacet,
    DimensionMismatch,
    DuplicateFacet,
    DuplicateId,
    DuplicateVertexInSimplex,
    InvalidCellId,
    RepeatedVertex,
    SignInUnoriented,
    UnknownCell,
    VertexIndexOutOfRange,
)

__all__ = [
    "Cell",
    "CellComplex",
    "ValidationReport",
    "build_complex",
    "build_simplicial",
    "build_polygonal",
    "validate",
]

SignedCellList = tuple  # tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Cell:
    """A cell and its signed boundary: ``boundary`` holds ``(facet_id, ±1)`` pairs."""

    id: str
    dim: int
    boundary: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(
            self, "boundary", tuple((str(f), int(s)) for f, s in self.boundary)
        )


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> list[str]:
        return [f"error: {e}" for e in self.errors] + [
            f"warning: {w}" for w in self.warnings
        ]


def _check_id(token: str) -> bool:
    return bool(token) and not any(ch.isspace() for ch in token) and token[0] != "#"


def _structural_problems(cells: Sequence[Cell], oriented: bool):
    """Yield ``(error_class, message, position)`` for every structural defect."""
    dims = {}
    for pos, cell in enumerate(cells):
        if not _check_id(cell.id):
            yield InvalidCellId, f"invalid cell id {cell.id!r}", pos
            continue
        if not isinstance(cell.dim, int) or cell.dim < 0:
            yield DimensionMismatch, f"cell {cell.id} has invalid dimension {cell.dim!r}", pos
            continue
        if cell.id in dims:
            yield DuplicateId, f"cell id {cell.id} declared twice", pos
            continue
        dims[cell.id] = cell.dim
    for pos, cell in enumerate(cells):
        if cell.dim == 0 and cell.boundary:
            yield DimensionMismatch, f"0-cell {cell.id} cannot have a boundary", pos
            continue
        seen = set()
        for facet, sign in cell.boundary:
            if facet not in dims:
                yield DanglingFacet, f"{cell.id} references unknown cell {facet}", pos
            elif dims[facet] != cell.dim - 1:
                yield (
                    DimensionMismatch,
                    f"{cell.id} (dim {cell.dim}) lists {facet} (dim {dims[facet]}) as a facet",
                    pos,
                )
            if facet in seen:
                yield DuplicateFacet, f"{cell.id} lists facet {facet} more than once", pos
            seen.add(facet)
            if sign not in (1, -1):
                yield CxnError, f"{cell.id}: incidence sign must be +1 or -1, got {sign}", pos
            elif sign == -1 and not oriented:
                yield SignInUnoriented, f"{cell.id}: sign -1 in an unoriented complex", pos


class CellComplex:
    """An immutable, validated regular cell complex.

    Use :func:`build_complex` (or one of the builders) rather than calling
    the constructor directly.
    """

    def __init__(self, cells: Iterable[Cell], oriented: bool):
        self.oriented = bool(oriented)
        self._cells = {c.id: c for c in cells}
        top = max((c.dim for c in self._cells.values()), default=-1)
        self.n = top
        by_dim = [[] for _ in range(top + 1)]
        for c in self._cells.values():
            by_dim[c.dim].append(c.id)
        self._by_dim = tuple(tuple(ids) for ids in by_dim)
        self._pos = {cid: i for ids in self._by_dim for i, cid in enumerate(ids)}

        cof = {cid: [] for cid in self._cells}
        for d in range(1, top + 1):
            for cid in self._by_dim[d]:
                for f, s in self._cells[cid].boundary:
                    cof[f].append((cid, s))
        self._cofacets = {k: tuple(v) for k, v in cof.items()}
        self._adj_cache = {}
        self._co_cache = {}
        self._hash = None

    # -- basic inventory --------------------------------------------------

    @property
    def cells(self) -> tuple:
        """All cells in insertion order."""
        return tuple(self._cells.values())

    @property
    def N(self) -> int:
        return len(self._cells)

    @property
    def N_hat(self) -> int:
        """Number of cells below the top dimension."""
        return self.N - (len(self._by_dim[self.n]) if self.n >= 0 else 0)

    def __len__(self):
        return len(self._cells)

    def __contains__(self, cid) -> bool:
        return cid in self._cells

    def __eq__(self, other):
        if not isinstance(other, CellComplex):
            return NotImplemented
        return self.oriented == other.oriented and self.cells == other.cells

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.oriented, self.cells))
        return self._hash

    def __repr__(self):
        counts = ", ".join(str(len(ids)) for ids in self._by_dim)
        kind = "oriented" if self.oriented else "unoriented"
        return f"CellComplex({kind}, n={self.n}, counts=[{counts}])"

    def cell(self, cid: str) -> Cell:
        try:
            return self._cells[cid]
        except KeyError:
            raise UnknownCell(f"unknown cell {cid!r}") from None

    def dim(self, cid: str) -> int:
        return self.cell(cid).dim

    def count(self, k: int) -> int:
        return len(self._by_dim[k]) if 0 <= k <= self.n else 0

    def counts(self) -> list[int]:
        return [len(ids) for ids in self._by_dim]

    def index_in_dim(self, cid: str) -> int:
        """Position of ``cid`` among the cells of its own dimension."""
        self.cell(cid)
        return self._pos[cid]

    def skeleton(self, k: int, rel: str = "=") -> list[str]:
        """Cells with dimension ``= k``, ``< k`` or ``> k``, in canonical order."""
        if rel in ("=", "eq"):
            dims = [k]
        elif rel in ("<", "lt"):
            dims = range(0, min(k, self.n + 1))
        elif rel in (">", "gt"):
            dims = range(max(k + 1, 0), self.n + 1)
        else:
            raise ValueError(f"unknown skeleton selector {rel!r}")
        out = []
        for d in dims:
            if 0 <= d <= self.n:
                out.extend(self._by_dim[d])
        return out

    def canonical_order(self) -> list[str]:
        return self.skeleton(self.n + 1, "<")

    # -- incidence --------------------------------------------------------

    def facets(self, cid: str, sign: int | None = None) -> SignedCellList:
        entries = self.cell(cid).boundary
        if sign is not None:
            entries = tuple(e for e in entries if e[1] == sign)
        return entries

    def cofacets(self, cid: str, sign: int | None = None) -> SignedCellList:
        self.cell(cid)
        entries = self._cofacets[cid]
        if sign is not None:
            entries = tuple(e for e in entries if e[1] == sign)
        return entries

    def incident_cells(self, cid: str, direction: str) -> SignedCellList:
        if direction == "facets":
            return self.facets(cid)
        if direction == "cofacets":
            return self.cofacets(cid)
        raise ValueError(f"direction must be 'facets' or 'cofacets', not {direction!r}")

    # -- neighbourhoods ---------------------------------------------------

    def witnesses(self, cid: str, relation: str) -> dict:
        """Map each neighbour ``a`` of ``cid`` to the cells witnessing it.

        For adjacency the witnesses are ``CO[a, cid]``; for coadjacency
        ``C[a, cid]``.  Both neighbours and witnesses are in canonical order.
        """
        if relation == "adjacent":
            cache, up, down = self._adj_cache, self.cofacets, self.facets
        elif relation == "coadjacent":
            cache, up, down = self._co_cache, self.facets, self.cofacets
        else:
            raise ValueError(f"relation must be 'adjacent' or 'coadjacent', not {relation!r}")
        hit = cache.get(cid)
        if hit is not None:
            return hit
        self.cell(cid)
        found = {}
        if self.oriented:
            for w, _ in up(cid, sign=1):
                for a, _ in down(w, sign=-1):
                    found.setdefault(a, []).append(w)
        else:
            for w, _ in up(cid):
                for a, _ in down(w):
                    if a != cid:
                        found.setdefault(a, []).append(w)
        pos = self._pos
        out = {
            a: tuple(sorted(ws, key=pos.__getitem__))
            for a, ws in sorted(found.items(), key=lambda kv: pos[kv[0]])
        }
        cache[cid] = out
        return out

    def neighbors(self, cid: str, relation: str = "adjacent") -> frozenset:
        return frozenset(self.witnesses(cid, relation))

    def co_set(self, a: str, b: str, relation: str = "CO") -> frozenset:
        """Shared cofacets (``"CO"``) or shared facets (``"C"``) of two same-dim cells.

        Oriented complexes use ``cofacets-(a) ∩ cofacets+(b)`` and the
        analogous facet form, so ``CO[a, b]`` is non-empty exactly when
        ``a`` is adjacent to ``b``.  A cell shares nothing with itself.
        """
        if self.dim(a) != self.dim(b):
            raise DimensionMismatch(f"{a} and {b} have different dimensions")
        if relation == "CO":
            inc = self.cofacets
        elif relation == "C":
            inc = self.facets
        else:
            raise ValueError(f"relation must be 'CO' or 'C', not {relation!r}")
        if a == b:
            return frozenset()
        if self.oriented:
            left = {w for w, _ in inc(a, sign=-1)}
            right = {w for w, _ in inc(b, sign=1)}
        else:
            left = {w for w, _ in inc(a)}
            right = {w for w, _ in inc(b)}
        return frozenset(left & right)

    # -- derived complexes ------------------------------------------------

    def unoriented(self) -> "CellComplex":
        """The same complex with orientation data dropped (all signs +1)."""
        cells = [
            Cell(c.id, c.dim, tuple((f, 1) for f, _ in c.boundary)) for c in self.cells
        ]
        return CellComplex(cells, oriented=False)

    def relabel(self, mapping) -> "CellComplex":
        """Rename cells through ``mapping`` (dict or callable); order is kept."""
        rename = mapping if callable(mapping) else mapping.__getitem__
        cells = [
            Cell(rename(c.id), c.dim, tuple((rename(f), s) for f, s in c.boundary))
            for c in self.cells
        ]
        return build_complex(cells, self.oriented)


def build_complex(cell_specs: Iterable, oriented: bool = True) -> CellComplex:
    """Validate cell specs and build a :class:`CellComplex`.

    ``cell_specs`` may hold :class:`Cell` objects or ``(id, dim, boundary)``
    tuples, in any order.  The first structural defect is raised.
    """
    cells = [c if isinstance(c, Cell) else Cell(*c) for c in cell_specs]
    for err, msg, _ in _structural_problems(cells, oriented):
        raise err(msg)
    return CellComplex(cells, oriented)


def _chain_defects(X: CellComplex) -> list[str]:
    out = []
    for k in range(2, X.n + 1):
        for cid in X.skeleton(k):
            total = Counter()
            for f, s in X.facets(cid):
                for g, t in X.facets(f):
                    total[g] += s * t
            bad = [(g, v) for g, v in total.items() if v != 0]
            if bad:
                bad.sort(key=lambda gv: X.index_in_dim(gv[0]))
                terms = " ".join(f"{v:+d}*{g}" for g, v in bad)
                out.append(f"boundary of boundary of {cid} is nonzero: {terms}")
    return out


def validate(X, check_chain: bool = False, oriented: bool | None = None) -> ValidationReport:
    """Report structural errors and, optionally, ``∂∘∂ ≠ 0`` warnings.

    ``X`` is either a built complex or a raw sequence of cell specs (in
    which case ``oriented`` must be given).  Never raises on bad input.
    """
    report = ValidationReport()
    if isinstance(X, CellComplex):
        cells, oriented = list(X.cells), X.oriented
    else:
        cells = [c if isinstance(c, Cell) else Cell(*c) for c in X]
        oriented = bool(oriented)
    for err, msg, _ in _structural_problems(cells, oriented):
        report.errors.append(f"{err.__name__}: {msg}")
    if check_chain and report.ok:
        cx = X if isinstance(X, CellComplex) else CellComplex(cells, oriented)
        if cx.oriented:
            report.warnings.extend(_chain_defects(cx))
    return report


# -- builders ---------------------------------------------------------------


def _vertex_key(v):
    return (0, v, "") if isinstance(v, int) else (1, 0, str(v))


def build_simplicial(maximal_simplices: Sequence[Sequence]) -> CellComplex:
    """Oriented simplicial complex generated by the given maximal simplices.

    Vertices of each simplex are sorted ascending (integers numerically) and
    the face opposite the i-th vertex gets sign ``(-1)**i``.  A k-simplex is
    named by its vertex ids joined with ``-``.
    """
    simplices = set()
    for simplex in maximal_simplices:
        verts = tuple(simplex)
        if len(set(verts)) != len(verts):
            raise DuplicateVertexInSimplex(f"simplex {list(verts)} repeats a vertex")
        if not verts:
            continue
        verts = tuple(sorted(verts, key=_vertex_key))
        size = len(verts)
        # all non-empty subsets, kept sorted
        for mask in range(1, 1 << size):
            simplices.add(tuple(verts[i] for i in range(size) if mask >> i & 1))

    def name(s):
        return "-".join(str(v) for v in s)

    ordered = sorted(simplices, key=lambda s: (len(s), [_vertex_key(v) for v in s]))
    cells = []
    for s in ordered:
        if len(s) == 1:
            cells.append(Cell(name(s), 0, ()))
        else:
            bd = tuple(
                (name(s[:i] + s[i + 1:]), 1 if i % 2 == 0 else -1) for i in range(len(s))
            )
            cells.append(Cell(name(s), len(s) - 1, bd))
    return build_complex(cells, oriented=True)


def build_polygonal(vertex_count: int, faces: Sequence[Sequence[int]]) -> CellComplex:
    """Oriented polygonal 2-complex: vertices ``v0..``, edges ``e0..``, faces ``f0..``.

    Each edge is oriented along the first face traversal that visits it;
    a face's boundary sign is +1 where the cycle runs along the edge.
    """
    if vertex_count < 0:
        raise VertexIndexOutOfRange("vertex_count must be non-negative")
    cells = [Cell(f"v{i}", 0, ()) for i in range(vertex_count)]
    edges = {}
    face_cells = []
    for fi, cycle in enumerate(faces):
        cycle = [int(v) for v in cycle]
        if len(set(cycle)) < 3:
            raise CycleTooShort(f"face {fi} has fewer than 3 distinct vertices: {cycle}")
        if len(set(cycle)) != len(cycle):
            raise RepeatedVertex(f"face {fi} visits a vertex twice: {cycle}")
        for v in cycle:
            if not 0 <= v < vertex_count:
                raise VertexIndexOutOfRange(f"face {fi} uses vertex {v} of {vertex_count}")
        bd = []
        for i, u in enumerate(cycle):
            w = cycle[(i + 1) % len(cycle)]
            key = (u, w) if (u, w) in edges else (w, u) if (w, u) in edges else None
            if key is None:
                key = (u, w)
                edges[key] = Cell(f"e{len(edges)}", 1, ((f"v{u}", -1), (f"v{w}", 1)))
            bd.append((edges[key].id, 1 if key == (u, w) else -1))
        face_cells.append(Cell(f"f{fi}", 2, tuple(bd)))
    return build_complex(cells + list(edges.values()) + face_cells, oriented=True)
