"""Command-line front end.

Subcommands cover validation, GM recognition, quartic decomposition, tree
export, scaling, Feynman enumeration, covariance solving, the Gaussian
cross-check, and the matrix-model verification utilities. Exit codes:
0 success, 2 validation failure, 3 numeric non-convergence, 64 usage
error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bubbles, feynman, gluing, largen, maps, matrixmodel
from .errors import (
    CertificateMismatch,
    GradientTooLarge,
    MelonforgeError,
    NoConvergence,
    NotATreeGluing,
    OutsideBranch,
    QuadratureDiverged,
    SingularDiagnostic,
    UsageError,
    ValidationError,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64
EXIT_IO = 74

_VALIDATION_ERRORS = (ValidationError, CertificateMismatch, NotATreeGluing)
_NUMERIC_ERRORS = (
    NoConvergence,
    OutsideBranch,
    GradientTooLarge,
    QuadratureDiverged,
    SingularDiagnostic,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise IOError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON: {exc}") from exc


def _emit(data, fmt="json"):
    if fmt == "json":
        print(json.dumps(data, indent=2))
    else:
        for row in data:
            print("\t".join(str(x) for x in row))


def _load_bubble(path):
    return bubbles.validate(_load_json(path))


def _recognized(b):
    cert = bubbles.recognize_gm(b)
    if cert is None:
        raise ValidationError("bubble is not generalized melonic")
    return cert


def _load_tree(path):
    return gluing.plane_tree_from_json(_load_json(path))


def cmd_validate(args):
    b = _load_bubble(args.file)
    _emit({"valid": True, "d": b.d, "n_vertices": b.n_vertices})


def cmd_recognize(args):
    b = _load_bubble(args.file)
    cert = bubbles.recognize_gm(b)
    if cert is None:
        _emit({"gm": False})
        return
    out = bubbles.certificate_to_json(cert)
    out["gm"] = True
    out["multiset"] = sorted(str(c) for c in cert.multiset())
    _emit(out)


def cmd_decompose(args):
    b = _load_bubble(args.file)
    g = gluing.decompose(b, _recognized(b))
    _emit(gluing.gluing_to_json(g))


def cmd_tree(args):
    b = _load_bubble(args.file)
    t = gluing.to_plane_tree(gluing.decompose(b, _recognized(b)))
    _emit(gluing.plane_tree_to_json(t))


def cmd_scaling(args):
    b = _load_bubble(args.file)
    s = bubbles.scaling_coefficient(_recognized(b))
    _emit({"s": str(s), "d": b.d, "n_vertices": b.n_vertices})


def _parts_from_args(args):
    parts = []
    for i, path in enumerate(args.files):
        b = _load_bubble(path)
        parts.append((f"{i}:{path}", b, args.copies))
    return parts


def _scalings_for(parts):
    return {
        r: bubbles.scaling_coefficient(_recognized(b)) for r, b, _ in parts
    }


def cmd_enumerate(args):
    parts = _parts_from_args(args)
    scalings = _scalings_for(parts)
    rows = [("matching", "total_cycles", "delta")]
    count = 0
    for g in feynman.enumerate_feynman(
        parts, connected_only=not args.all, cap=args.cap
    ):
        count += 1
        rows.append(
            (
                ",".join(map(str, g.matching)),
                feynman.total_cycles(g),
                str(feynman.delta(g, scalings).n_exponent),
            )
        )
    if args.format == "tsv":
        _emit(rows, "tsv")
    else:
        _emit({"count": count, "graphs": [list(r) for r in rows[1:]]})


def cmd_gmax(args):
    parts = _parts_from_args(args)
    scalings = _scalings_for(parts)
    graphs = feynman.enumerate_feynman(
        parts, connected_only=not args.all, cap=args.cap
    )
    dominant = feynman.gmax_filter(graphs, scalings)
    best = str(feynman.delta(dominant[0], scalings).n_exponent) if dominant else None
    _emit(
        {
            "max_delta": best,
            "count": len(dominant),
            "matchings": [list(g.matching) for g in dominant],
        }
    )


def cmd_covariance(args):
    if args.series:
        series = largen.covariance_series(args.V, args.order)
        rows = [("exponent", "coefficient")]
        for k, v in series.coefficients:
            rows.append((",".join(map(str, k)), str(v)))
        if args.format == "tsv":
            _emit(rows, "tsv")
        else:
            _emit({"coefficients": [[list(k), str(v)] for k, v in series.coefficients]})
        return
    if len(args.t) != len(args.V):
        raise UsageError("--t must be given once per --V")
    sol = largen.solve_covariance(list(zip(args.t, args.V)), tol=args.tol)
    _emit({"C": sol.value, "residual": sol.residual})


def cmd_crosscheck(args):
    b = _load_bubble(args.file)
    rep = largen.universality_crosscheck(b, args.order, cap=args.cap)
    _emit(
        {
            "match": rep.match,
            "sign": rep.sign,
            "enumerated": [str(x) for x in rep.enumerated],
            "series": [str(x) for x in rep.series],
            "first_mismatch": rep.first_mismatch,
        }
    )


def cmd_verify_determinant(args):
    t = _load_tree(args.tree)
    err = matrixmodel.determinant_lemma_check(
        t, n=args.n, trials=args.trials, seed=args.seed
    )
    _emit({"max_relative_error": err, "trials": args.trials, "n": args.n})


def cmd_eta(args):
    tm = matrixmodel.tree_model(_load_tree(args.tree))
    eta = matrixmodel.eta_exponents(tm)
    rows = [("halfedge", "eta")] + [(h, str(eta[h])) for h in sorted(eta)]
    if args.format == "tsv":
        _emit(rows, "tsv")
    else:
        _emit({"eta": {str(h): str(eta[h]) for h in sorted(eta)}, "s": str(tm.s)})


def cmd_saddle(args):
    tm = matrixmodel.tree_model(_load_tree(args.tree))
    sol = matrixmodel.saddle_point(tm, args.t, tol=args.tol)
    _emit(
        {
            "W": sol.w,
            "gradient_norm": sol.gradient_norm,
            "y": {str(h): v for h, v in sorted(sol.y.items())},
        }
    )


def cmd_expand_log(args):
    tm = matrixmodel.tree_model(_load_tree(args.tree))
    terms = matrixmodel.expand_log_interaction(tm, args.order, dedupe=args.dedupe)
    rows = [("word", "coefficient")]
    rows += [(",".join(map(str, w)), str(c)) for w, c in terms]
    if args.format == "tsv":
        _emit(rows, "tsv")
    else:
        _emit({"terms": [[list(w), str(c)] for w, c in terms]})


def cmd_export_dot(args):
    data = _load_json(args.file)
    if args.kind == "bubble":
        print(bubbles.bubble_to_dot(bubbles.validate(data)))
    elif args.kind == "gluing":
        print(gluing.gluing_to_dot(gluing.gluing_from_json(data)))
    elif args.kind == "tree":
        print(gluing.plane_tree_to_dot(gluing.plane_tree_from_json(data)))
    else:
        print(maps.map_to_dot(maps.map_from_json(data)))


def build_parser():
    p = _Parser(prog="melonforge", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(fn=fn)
        return sp

    for name, fn in (
        ("validate", cmd_validate),
        ("recognize", cmd_recognize),
        ("decompose", cmd_decompose),
        ("tree", cmd_tree),
        ("scaling", cmd_scaling),
    ):
        sp = add(name, fn)
        sp.add_argument("file")

    for name, fn in (("enumerate", cmd_enumerate), ("gmax", cmd_gmax)):
        sp = add(name, fn)
        sp.add_argument("files", nargs="+")
        sp.add_argument("--copies", type=int, default=1)
        sp.add_argument("--all", action="store_true", help="include disconnected")
        sp.add_argument("--cap", type=int, default=9)
        sp.add_argument("--format", choices=("json", "tsv"), default="json")

    sp = add("covariance", cmd_covariance)
    sp.add_argument("--V", type=int, action="append", required=True)
    sp.add_argument("--t", type=float, action="append", default=[])
    sp.add_argument("--series", action="store_true")
    sp.add_argument("--order", type=int, default=8)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--format", choices=("json", "tsv"), default="json")

    sp = add("crosscheck", cmd_crosscheck)
    sp.add_argument("file")
    sp.add_argument("--order", type=int, default=3)
    sp.add_argument("--cap", type=int, default=9)

    sp = add("verify-determinant", cmd_verify_determinant)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("eta", cmd_eta)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--format", choices=("json", "tsv"), default="json")

    sp = add("saddle", cmd_saddle)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = add("expand-log", cmd_expand_log)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--order", type=int, default=3)
    sp.add_argument("--dedupe", action="store_true")
    sp.add_argument("--format", choices=("json", "tsv"), default="json")

    sp = add("export-dot", cmd_export_dot)
    sp.add_argument("file")
    sp.add_argument(
        "--kind", choices=("bubble", "gluing", "tree", "map"), default="bubble"
    )

    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args.fn(args)
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _VALIDATION_ERRORS as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MelonforgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
