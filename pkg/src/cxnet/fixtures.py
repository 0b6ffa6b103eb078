"""Small complexes shipped with the package."""

from importlib import resources

from .complex import CellComplex, build_simplicial
from .io import parse_complex, parse_off

FILES = ("fig4a.cxc", "fig4b.cxc", "triangle.cxc", "two_triangles.cxc", "square.off", "two_triangles.off")


def path(name: str):
    return resources.files("cxnet") / "data" / name


def load(name: str) -> CellComplex:
    text = path(name).read_text()
    return parse_off(text) if name.endswith(".off") else parse_complex(text)


def fig4a() -> CellComplex:
    return load("fig4a.cxc")


def fig4b() -> CellComplex:
    return load("fig4b.cxc")


def _maybe_unoriented(X: CellComplex, oriented: bool) -> CellComplex:
    return X if oriented else X.unoriented()


def triangle(oriented: bool = False) -> CellComplex:
    """The filled triangle on vertices a, b, c."""
    return _maybe_unoriented(build_simplicial([["a", "b", "c"]]), oriented)


def two_triangles(oriented: bool = False) -> CellComplex:
    """Filled triangles abc and def joined by the bridge edge c-d."""
    return _maybe_unoriented(
        build_simplicial([["a", "b", "c"], ["d", "e", "f"], ["c", "d"]]), oriented
    )


def path_graph(oriented: bool = False) -> CellComplex:
    """The path a - b - c."""
    return _maybe_unoriented(build_simplicial([["a", "b"], ["b", "c"]]), oriented)
