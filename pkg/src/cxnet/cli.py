"""Command-line interface: ``cxnet <subcommand> ...``.

Exit codes: 0 success, 1 invalid input data, 2 usage error.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import ConfigInvalid, CxnError
from .message_passing import (
    AffineLayer,
    AffineStack,
    CcxnWeights,
    FeatureMap,
    SchemeConfig,
    ccxn_forward,
    cxn_forward,
    init_scheme_config,
)
from .operators import (
    adjacency_matrix,
    boundary_matrix,
    coadjacency_matrix,
    degree_matrix,
    normalized_operator,
)
from .complex import validate
from .representation import TrainConfig, generate_walks, train_embeddings

SCHEME_NAMES = {"adj": "adjacency", "coadj": "coadjacency", "hodge": "hodge"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _write(path, text: str) -> None:
    Path(path).write_text(text)


def _load(path):
    try:
        return io.load_complex(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    X = _load(args.file)
    report = validate(X, check_chain=args.check_chain)
    for line in report.lines():
        print(line)
    if report.ok:
        print(f"ok: {args.file} is a valid {'oriented' if X.oriented else 'unoriented'} "
              f"{X.n}-dimensional complex")
    return 0 if report.ok else 1


def cmd_info(args) -> int:
    X = _load(args.file)
    print(f"oriented: {'yes' if X.oriented else 'no'}")
    print(f"dimension: {X.n}")
    for k, c in enumerate(X.counts()):
        print(f"cells[{k}]: {c}")
    print(f"N: {X.N}")
    print(f"N_hat: {X.N_hat}")
    return 0


def cmd_matrices(args) -> int:
    X = _load(args.file)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    suffix = "" if args.dim is None else f"_{args.dim}"
    written = []
    if args.kind == "boundary":
        ks = range(1, X.n + 1) if args.dim is None else [args.dim]
        for k in ks:
            written.append((f"B_{k}.mtx", boundary_matrix(X, k)))
    elif args.kind == "adj":
        A = adjacency_matrix(X, args.dim)
        written += [(f"A_adj{suffix}.mtx", A), (f"D_adj{suffix}.mtx", degree_matrix(A))]
    elif args.kind == "coadj":
        A = coadjacency_matrix(X, args.dim)
        written += [(f"A_co{suffix}.mtx", A), (f"D_co{suffix}.mtx", degree_matrix(A))]
    else:
        A = normalized_operator(adjacency_matrix(X, args.dim), args.variant)
        written.append((f"A_adj_{args.variant}{suffix}.mtx", A))
    for name, M in written:
        _write(out / name, io.write_matrix(M, name=name[:-4]))
        print(f"wrote {out / name} ({M.shape[0]}x{M.shape[1]}, {M.nnz} nonzeros)")
    return 0


_STACK_RE = re.compile(r"^(alpha|phi)/(\d+)/(\d+)(?:/(\d+))?$")


def _scheme_config(stacks: dict, scheme: str, args) -> SchemeConfig:
    alpha, phi = {}, {}
    for name, stack in stacks.items():
        m = _STACK_RE.match(name)
        if not m:
            raise ConfigInvalid(f"unexpected stack name {name!r} for the {scheme} scheme")
        kind, k, dim, nb = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
        if kind == "alpha" and nb is None:
            alpha[k, dim] = stack
        elif kind == "phi" and scheme == "hodge" and nb is not None:
            phi[k, dim, int(nb)] = stack
        elif kind == "phi" and scheme != "hodge" and nb is None:
            phi[k, dim] = stack
        else:
            raise ConfigInvalid(f"unexpected stack name {name!r} for the {scheme} scheme")
    return SchemeConfig(scheme, alpha, phi, outer=args.outer, inner=args.inner,
                        compatible_sign=args.compatible_sign)


def _ccxn_weights(stacks: dict) -> CcxnWeights:
    mats = []
    for i in range(len(stacks)):
        stack = stacks.get(f"W{i}")
        if stack is None:
            raise ConfigInvalid(f"ccxn weights must be stacks W0..W{len(stacks) - 1}")
        layer = stack.layers[0]
        if len(stack.layers) != 1 or layer.activation != "identity" or np.any(layer.bias):
            raise ConfigInvalid(f"stack W{i} must be one identity layer with zero bias")
        mats.append(layer.weight)
    return CcxnWeights(tuple(mats))


def cmd_forward(args) -> int:
    X = _load(args.file)
    stacks = io.parse_weights(_read(args.weights))
    feats = _read(args.features)
    if args.scheme == "ccxn":
        ids = X.skeleton(X.n, "<")
        H0 = io.read_feature_matrix(X, feats, ids)
        H = ccxn_forward(X, H0, _ccxn_weights(stacks), args.variant, args.layers)
        dims = sorted({X.dim(c) for c in ids})
        fm = FeatureMap({m: H[[i for i, c in enumerate(ids) if X.dim(c) == m]] for m in dims})
    else:
        cfg = _scheme_config(stacks, SCHEME_NAMES[args.scheme], args)
        fm = cxn_forward(X, io.read_features(X, feats), cfg, args.layers)
    _write(args.out, io.write_features(X, fm))
    print(f"wrote {args.out}")
    return 0


def cmd_walks(args) -> int:
    X = _load(args.file)
    corpus = generate_walks(X, args.dim, args.length, args.count, args.seed)
    _write(args.out, io.write_walks(corpus))
    print(f"wrote {len(corpus)} walks to {args.out}")
    return 0


def cmd_embed(args) -> int:
    X = _load(args.file)
    cfg = TrainConfig(
        method=args.method, d=args.dim_embed, epochs=args.epochs, lr=args.lr, seed=args.seed,
        walk_length=args.walk_length, walks_per_cell=args.walks_per_cell, window=args.window,
        dims=args.train_dim,
    )
    emb = train_embeddings(X, cfg)
    _write(args.out, io.write_embeddings(emb))
    if emb.history:
        print(f"final loss {emb.history[-1]:.6g} after {len(emb.history)} epochs")
    print(f"wrote {args.out}")
    return 0


def cmd_init_weights(args) -> int:
    X = _load(args.file)
    if args.scheme == "ccxn":
        W = CcxnWeights.random(args.width, args.layers, args.seed)
        stacks = {
            f"W{i}": AffineStack((AffineLayer(w, np.zeros(args.width), "identity"),))
            for i, w in enumerate(W.matrices)
        }
    else:
        cfg = init_scheme_config(X, SCHEME_NAMES[args.scheme], {m: args.width for m in range(X.n + 1)},
                                 args.layers, args.seed)
        stacks = {f"alpha/{k}/{m}": s for (k, m), s in cfg.alpha.items()}
        stacks.update({"phi/" + "/".join(map(str, key)): s for key, s in cfg.phi.items()})
    _write(args.out, io.serialize_weights(stacks))
    print(f"wrote {len(stacks)} stacks to {args.out}")
    return 0


def cmd_init_features(args) -> int:
    X = _load(args.file)
    rng = np.random.default_rng(args.seed)
    top = X.n if args.below_top else X.n + 1
    blocks = {m: rng.standard_normal((X.count(m), args.width)) for m in range(top)}
    _write(args.out, io.write_features(X, FeatureMap(blocks)))
    print(f"wrote {args.out}")
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cxnet", description="Neural-network computation on cell complexes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check a complex file")
    s.add_argument("file")
    s.add_argument("--check-chain", action="store_true", help="warn where the boundary of a boundary is nonzero")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("info", help="cell counts per dimension")
    s.add_argument("file")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("matrices", help="write operators in MatrixMarket format")
    s.add_argument("file")
    s.add_argument("--kind", required=True, choices=["adj", "coadj", "boundary", "norm-adj"])
    s.add_argument("--dim", type=int)
    s.add_argument("--variant", choices=["plain", "renormalized"], default="renormalized")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_matrices)

    s = sub.add_parser("forward", help="evaluate a message passing network")
    s.add_argument("file")
    s.add_argument("--scheme", required=True, choices=["ccxn", "adj", "coadj", "hodge"])
    s.add_argument("--features", required=True)
    s.add_argument("--weights", required=True)
    s.add_argument("--layers", type=int)
    s.add_argument("--variant", choices=["plain", "renormalized"], default="renormalized")
    s.add_argument("--outer", choices=["sum", "mean", "max"], default="sum")
    s.add_argument("--inner", choices=["sum", "mean", "max"], default="sum")
    s.add_argument("--compatible-sign", type=int, choices=[1, -1], default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_forward)

    s = sub.add_parser("walks", help="seeded random walks on k-cells")
    s.add_argument("file")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--count", type=int, required=True, help="walks per cell")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_walks)

    d = TrainConfig()
    s = sub.add_parser("embed", help="train cell embeddings")
    s.add_argument("file")
    s.add_argument("--method", required=True, choices=["rw", "ip", "lap"])
    s.add_argument("--dim-embed", type=int, default=d.d)
    s.add_argument("--epochs", type=int, default=d.epochs)
    s.add_argument("--lr", type=float, default=d.lr)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--walk-length", type=int, default=d.walk_length)
    s.add_argument("--walks-per-cell", type=int, default=d.walks_per_cell)
    s.add_argument("--window", type=int, default=d.window)
    s.add_argument("--train-dim", type=int, help="train only this dimension")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("init-weights", help="write random weights for 'forward'")
    s.add_argument("file")
    s.add_argument("--scheme", required=True, choices=["ccxn", "adj", "coadj", "hodge"])
    s.add_argument("--width", type=int, required=True)
    s.add_argument("--layers", type=int, default=1)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_init_weights)

    s = sub.add_parser("init-features", help="write random initial features")
    s.add_argument("file")
    s.add_argument("--width", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--below-top", action="store_true", help="only cells below the top dimension (ccxn input)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_init_features)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cxnet: error: {exc}", file=sys.stderr)
        return 2
    except CxnError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
