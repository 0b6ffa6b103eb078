"""Text formats: CXC complexes, OFF meshes, MatrixMarket, feature/embedding TSV,
walk corpora and weight files.

CXC grammar (one directive per line, ``#`` starts a comment line)::

    cxc 1 oriented            # or: unoriented
    c <id> <dim>              # declare a cell
    b <id> <facet_id> <+1|-1> # append a signed boundary entry

A cell must be declared before a ``b`` line mentions it; otherwise order
is free.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .complex import Cell, CellComplex, _check_id, build_complex, build_polygonal
from .errors import (
    CycleTooShort,
    DanglingFacet,
    DimensionMismatch,
    DuplicateFacet,
    DuplicateId,
    InvalidCellId,
    MissingFeature,
    ParseError,
    SignInUnoriented,
    UnknownCell,
    VertexIndexOutOfRange,
    WidthMismatch,
)
from .message_passing import AffineLayer, AffineStack, FeatureMap
from .operators import SparseMatrix
from .representation import EmbeddingTable, WalkCorpus

__all__ = [
    "parse_complex",
    "serialize_complex",
    "parse_off",
    "load_complex",
    "write_matrix",
    "write_features",
    "read_features",
    "write_embeddings",
    "write_walks",
    "read_walks",
    "parse_weights",
    "serialize_weights",
]


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield no, line.split()


# -- CXC ----------------------------------------------------------------------


def parse_complex(text: str) -> CellComplex:
    lines = _content_lines(text)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty file, expected a 'cxc 1 oriented|unoriented' header", 1) from None
    if len(head) != 3 or head[0] != "cxc" or head[1] != "1" or head[2] not in ("oriented", "unoriented"):
        raise ParseError(f"bad header {' '.join(head)!r}", no)
    oriented = head[2] == "oriented"
    dims, bounds, order = {}, {}, []
    for no, tok in lines:
        if tok[0] == "c":
            if len(tok) != 3:
                raise ParseError("expected 'c <id> <dim>'", no)
            cid = tok[1]
            if not _check_id(cid):
                raise InvalidCellId(f"invalid cell id {cid!r}", no)
            try:
                dim = int(tok[2])
            except ValueError:
                raise ParseError(f"dimension {tok[2]!r} is not an integer", no) from None
            if dim < 0:
                raise ParseError("dimension must be non-negative", no)
            if cid in dims:
                raise DuplicateId(f"cell id {cid} declared twice", no)
            dims[cid] = dim
            bounds[cid] = []
            order.append(cid)
        elif tok[0] == "b":
            if len(tok) != 4:
                raise ParseError("expected 'b <id> <facet_id> <+1|-1>'", no)
            cid, facet, sign_tok = tok[1:]
            if sign_tok not in ("+1", "-1", "1"):
                raise ParseError(f"sign must be +1 or -1, got {sign_tok!r}", no)
            sign = -1 if sign_tok == "-1" else 1
            if cid not in dims:
                raise UnknownCell(f"boundary for undeclared cell {cid}", no)
            if facet not in dims:
                raise DanglingFacet(f"{cid} references undeclared cell {facet}", no)
            if dims[facet] != dims[cid] - 1:
                raise DimensionMismatch(
                    f"{cid} (dim {dims[cid]}) cannot have {facet} (dim {dims[facet]}) as a facet", no
                )
            if any(f == facet for f, _ in bounds[cid]):
                raise DuplicateFacet(f"{cid} lists facet {facet} twice", no)
            if sign == -1 and not oriented:
                raise SignInUnoriented("sign -1 in an unoriented complex", no)
            bounds[cid].append((facet, sign))
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", no)
    return build_complex([Cell(c, dims[c], tuple(bounds[c])) for c in order], oriented)


def serialize_complex(X: CellComplex) -> str:
    out = [f"cxc 1 {'oriented' if X.oriented else 'unoriented'}"]
    out += [f"c {c.id} {c.dim}" for c in X.cells]
    for c in X.cells:
        out += [f"b {c.id} {f} {s:+d}" for f, s in c.boundary]
    return "\n".join(out) + "\n"


# -- OFF ----------------------------------------------------------------------


def parse_off(text: str) -> CellComplex:
    """Polygonal complex from an OFF mesh; vertex coordinates are checked, then dropped."""
    lines = _content_lines(text)
    try:
        no, head = next(lines)
    except StopIteration:
        raise ParseError("empty file, expected 'OFF'", 1) from None
    if head[0] != "OFF":
        raise ParseError(f"expected 'OFF' header, got {head[0]!r}", no)
    counts = head[1:]
    if not counts:
        try:
            no, counts = next(lines)
        except StopIteration:
            raise ParseError("missing counts line", no + 1) from None
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise ParseError("counts line must start with '<vertices> <faces>'", no) from None
    for _ in range(nv):
        try:
            no, tok = next(lines)
        except StopIteration:
            raise ParseError("file ends inside the vertex list", no + 1) from None
        try:
            [float(t) for t in tok[:3]]
        except ValueError:
            raise ParseError("vertex coordinates must be numbers", no) from None
        if len(tok) < 3:
            raise ParseError("vertex line needs 3 coordinates", no)
    faces = []
    for _ in range(nf):
        try:
            no, tok = next(lines)
        except StopIteration:
            raise ParseError("file ends inside the face list", no + 1) from None
        try:
            k = int(tok[0])
            idx = [int(t) for t in tok[1:1 + k]]
        except ValueError:
            raise ParseError("face line must be '<k> <i1> ... <ik>'", no) from None
        if len(idx) != k:
            raise ParseError(f"face declares {k} vertices but lists {len(idx)}", no)
        if len(set(idx)) < 3:
            raise CycleTooShort(f"face needs at least 3 distinct vertices: {idx}", no)
        if any(not 0 <= v < nv for v in idx):
            raise VertexIndexOutOfRange(f"face vertex outside 0..{nv - 1}: {idx}", no)
        faces.append(idx)
    return build_polygonal(nv, faces)


def load_complex(path) -> CellComplex:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".off":
        return parse_off(text)
    return parse_complex(text)


# -- MatrixMarket ---------------------------------------------------------------


def write_matrix(M: SparseMatrix, name: str | None = None) -> str:
    """MatrixMarket coordinate text, 1-based, with the index-to-cell table in comments."""
    out = ["%%MatrixMarket matrix coordinate real general"]
    if name:
        out.append(f"% {name}")
    out += [f"% row {i + 1} {lab}" for i, lab in enumerate(M.row_labels)]
    out += [f"% col {j + 1} {lab}" for j, lab in enumerate(M.col_labels)]
    trip = M.triplets()
    out.append(f"{M.shape[0]} {M.shape[1]} {len(trip)}")
    out += [f"{i + 1} {j + 1} {repr(v)}" for i, j, v in trip]
    return "\n".join(out) + "\n"


# -- TSV ------------------------------------------------------------------------


def _tsv_row(cid, dim, vec) -> str:
    return "\t".join([cid, str(dim)] + [_fmt(v) for v in vec])


def write_features(X: CellComplex, H: FeatureMap) -> str:
    rows = []
    for m in sorted(H.blocks):
        for i, cid in enumerate(X.skeleton(m)):
            rows.append(_tsv_row(cid, m, H.blocks[m][i]))
    return "\n".join(rows) + ("\n" if rows else "")


def write_embeddings(emb: EmbeddingTable) -> str:
    rows = [_tsv_row(c, m, emb.vectors[i]) for i, (c, m) in enumerate(zip(emb.ids, emb.dims))]
    return "\n".join(rows) + ("\n" if rows else "")


def read_feature_rows(X: CellComplex, text: str) -> dict:
    """``{cell_id: vector}`` from TSV rows in any order; the dim column must match."""
    rows = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        tok = raw.rstrip("\n").split("\t")
        if len(tok) < 2:
            raise ParseError("expected 'cell_id<TAB>dim<TAB>values...'", no)
        cid = tok[0].strip()
        if cid not in X:
            raise UnknownCell(f"features for unknown cell {cid}", no)
        try:
            dim = int(tok[1])
            vec = np.array([float(t) for t in tok[2:]], dtype=np.float64)
        except ValueError:
            raise ParseError("non-numeric field", no) from None
        if dim != X.dim(cid):
            raise DimensionMismatch(f"{cid} has dimension {X.dim(cid)}, row says {dim}", no)
        if cid in rows:
            raise DuplicateId(f"two feature rows for {cid}", no)
        rows[cid] = vec
    return rows


def read_features(X: CellComplex, text: str, dims=None) -> FeatureMap:
    return FeatureMap.from_rows(X, read_feature_rows(X, text), dims)


def read_feature_matrix(X: CellComplex, text: str, ids) -> np.ndarray:
    """Dense feature matrix with rows in the order of ``ids``."""
    rows = read_feature_rows(X, text)
    missing = [c for c in ids if c not in rows]
    if missing:
        raise MissingFeature(f"no features for cells {missing[:5]}")
    widths = {rows[c].shape[0] for c in ids}
    if len(widths) > 1:
        raise WidthMismatch("feature rows have different widths")
    return np.vstack([rows[c] for c in ids]) if ids else np.zeros((0, 0))


# -- walk corpus ----------------------------------------------------------------


def write_walks(corpus: WalkCorpus) -> str:
    out = [f"# dim={corpus.dim} seed={corpus.seed} length={corpus.length}"]
    out += [" ".join(w) for w in corpus.walks]
    return "\n".join(out) + "\n"


def read_walks(X: CellComplex, text: str) -> WalkCorpus:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError("missing '# dim=<k> seed=<s> length=<L>' header", 1)
    meta = {}
    for item in lines[0][1:].split():
        key, _, val = item.partition("=")
        meta[key] = val
    try:
        k, seed, length = int(meta["dim"]), int(meta["seed"]), int(meta["length"])
    except (KeyError, ValueError):
        raise ParseError("header must give integer dim, seed and length", 1) from None
    cells = tuple(X.skeleton(k))
    pos = {c: i for i, c in enumerate(cells)}
    walks = []
    for no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        ids = line.split()
        if len(ids) > length:
            raise ParseError(f"walk longer than the declared length {length}", no)
        try:
            walks.append([pos[c] for c in ids] + [-1] * (length - len(ids)))
        except KeyError as exc:
            raise UnknownCell(f"walk visits {exc.args[0]}, not a {k}-cell", no) from None
    arr = np.array(walks, dtype=np.int64).reshape(len(walks), length)
    per_cell = len(walks) // len(cells) if cells else 0
    return WalkCorpus(cells, arr, k, seed, length, per_cell)


# -- weights ----------------------------------------------------------------------


def serialize_weights(stacks: dict) -> str:
    """Text form of named affine stacks (weights stored input-by-output)."""
    out = []
    for name, stack in stacks.items():
        out.append(f"stack {name} {len(stack.layers)}")
        for layer in stack.layers:
            rows, cols = layer.weight.shape
            out.append(f"layer {rows} {cols} {layer.activation}")
            out += [" ".join(_fmt(v) for v in row) for row in layer.weight]
            out.append(" ".join(_fmt(v) for v in layer.bias))
    return "\n".join(out) + "\n"


def parse_weights(text: str) -> dict:
    """Named :class:`AffineStack` objects, in file order."""
    lines = list(_content_lines(text))
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise ParseError("unexpected end of weights file", last + 1)
        item = lines[pos]
        pos += 1
        return item

    def numbers(no, tok, count):
        try:
            vals = [float(t) for t in tok]
        except ValueError:
            raise ParseError("non-numeric weight", no) from None
        if len(vals) != count:
            raise ParseError(f"expected {count} numbers, got {len(vals)}", no)
        return vals

    stacks = {}
    while pos < len(lines):
        no, tok = take()
        if tok[0] != "stack" or len(tok) != 3:
            raise ParseError("expected 'stack <name> <layers>'", no)
        name = tok[1]
        try:
            nlayers = int(tok[2])
        except ValueError:
            raise ParseError("layer count must be an integer", no) from None
        if name in stacks:
            raise ParseError(f"stack {name} defined twice", no)
        layers = []
        for _ in range(nlayers):
            no, tok = take()
            if tok[0] != "layer" or len(tok) != 4:
                raise ParseError("expected 'layer <rows> <cols> <activation>'", no)
            try:
                rows, cols = int(tok[1]), int(tok[2])
            except ValueError:
                raise ParseError("layer shape must be integers", no) from None
            W = np.array([numbers(*take(), cols) for _ in range(rows)]).reshape(rows, cols)
            b = np.array(numbers(*take(), cols))
            try:
                layers.append(AffineLayer(W, b, tok[3]))
            except ValueError as exc:
                raise ParseError(str(exc), no) from None
        try:
            stacks[name] = AffineStack(tuple(layers))
        except ValueError as exc:
            raise ParseError(str(exc), no) from None
    return stacks
