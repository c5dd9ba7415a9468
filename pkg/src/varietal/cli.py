"""Batch front door: ``varietal`` with cluster / synth / check / eval subcommands.

File formats
------------
Points CSV: comma-separated, ``.`` decimal, one point per row; an optional
header row is auto-detected (non-numeric first row); with ``--labeled`` the
trailing column is an integer subspace label.

Model JSON: ``{"ambient_dim": D, "affine": bool, "subspaces": [{"basis":
[[column] ...], "translation": [...]}]}`` (translation omitted for linear
models).

All JSON output is deterministic: keys in fixed order, floats rendered with
17 significant digits, so identical flags and seeds reproduce byte-identical
files.

Exit codes: 0 ok, 1 input error, 2 grouping failure, 3 insufficient data,
4 points inconsistent with the model.

The environment variable ``VARIETAL_THREADS`` caps the BLAS thread pools
(exported before numpy is loaded when the package is imported).
"""

import argparse
import json
import sys

import numpy as np
from scipy.optimize import linear_sum_assignment

from .asc import (
    ClusterConfig,
    check_general_position,
    cluster_affine,
    cluster_linear,
)
from .errors import (
    GroupingFailure,
    PointsOffModel,
    TooFewPoints,
    VarietalError,
)
from .numerics import DEFAULT_TOL, ToleranceConfig, largest_principal_angle, orthonormalize
from .subspaces import (
    AffineSubspace,
    LinearSubspace,
    UnionOfAffine,
    UnionOfLinear,
    embed_affine_union,
    check_transversality,
    homogenize_points,
    model_from_json,
    model_to_json,
    random_affine_union,
    sample_union,
    samples_to_arrays,
)


class CLIInputError(VarietalError):
    """Malformed file, flag, or inconsistent sizes; maps to exit code 1."""


# ---------------------------------------------------------------------------
# deterministic JSON / CSV serialization

def _render_json(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  {json.dumps(k)}: {_render_json(v, indent + 1)}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    return json.dumps(obj)


def _emit_json(obj, out_path):
    text = _render_json(obj) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _fmt_float(v):
    return format(float(v), ".17g")


def write_points_csv(path, points, labels=None):
    with open(path, "w") as fh:
        for i, row in enumerate(points):
            cells = [_fmt_float(v) for v in row]
            if labels is not None:
                cells.append(str(int(labels[i])))
            fh.write(",".join(cells) + "\n")


def read_points_csv(path, labeled=False):
    """Parse a points CSV; returns (points, labels-or-None)."""
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as exc:
        raise CLIInputError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in lines if ln]
    if not lines:
        raise CLIInputError(f"{path}: file contains no data rows")

    def parse_row(ln, row_no):
        cells = ln.split(",")
        out = []
        for col_no, cell in enumerate(cells, start=1):
            try:
                out.append(float(cell))
            except ValueError:
                raise CLIInputError(
                    f"{path}: row {row_no}, column {col_no}: "
                    f"cannot parse {cell.strip()!r} as a number"
                ) from None
        return out

    start = 0
    try:
        first = parse_row(lines[0], 1)
    except CLIInputError:
        start = 1          # header row
        if len(lines) == 1:
            raise CLIInputError(f"{path}: file contains no data rows") from None
        first = parse_row(lines[1], 2)

    rows = [first]
    width = len(first)
    for offset, ln in enumerate(lines[start + 1:], start=start + 2):
        row = parse_row(ln, offset)
        if len(row) != width:
            raise CLIInputError(
                f"{path}: row {offset} has {len(row)} columns, expected {width}"
            )
        rows.append(row)

    data = np.array(rows, dtype=float)
    if not labeled:
        return data, None
    if width < 2:
        raise CLIInputError(f"{path}: labeled data needs at least 2 columns")
    raw_labels = data[:, -1]
    if not np.all(raw_labels == np.round(raw_labels)):
        raise CLIInputError(f"{path}: trailing label column is not integral")
    return data[:, :-1], raw_labels.astype(int)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CLIInputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CLIInputError(f"{path}: invalid JSON: {exc}") from exc


def _load_model(path):
    try:
        return model_from_json(_load_json(path))
    except (KeyError, ValueError, VarietalError) as exc:
        if isinstance(exc, CLIInputError):
            raise
        raise CLIInputError(f"{path}: invalid model: {exc}") from exc


def _tolerances(args):
    return ToleranceConfig(
        rank_rtol=args.rank_rtol,
        angle_tol=args.angle_tol,
        residual_tol=args.residual_tol,
    )


# ---------------------------------------------------------------------------
# subcommands

def cmd_cluster(args):
    points, _ = read_points_csv(args.points_csv, labeled=args.labeled)
    config = ClusterConfig(
        n_subspaces=args.n,
        degree=args.degree,
        tolerances=_tolerances(args),
        grouping_angle=args.grouping_angle,
        affine=args.affine,
    )
    result = cluster_affine(points, config) if args.affine else cluster_linear(points, config)
    if args.out_basis:
        basis_json = [p.to_json() for p in result.basis.polynomials()]
        with open(args.out_basis, "w") as fh:
            fh.write(_render_json(basis_json) + "\n")
    _emit_json(result.to_json(), args.out)
    return 0


def _parse_synth_spec(obj):
    try:
        D = int(obj["ambient_dim"])
        if "dims" in obj:
            dims = [int(d) for d in obj["dims"]]
            flags = obj.get("affine", True)
        else:
            dims = [int(s["dim"]) for s in obj["subspaces"]]
            flags = [bool(s.get("affine", True)) for s in obj["subspaces"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CLIInputError(f"invalid synth spec: {exc}") from exc
    if isinstance(flags, bool):
        flags = [flags] * len(dims)
    if len(flags) != len(dims):
        raise CLIInputError("synth spec: affine flags do not match dims")
    if not dims or any(not (0 < d < D) for d in dims):
        raise CLIInputError("synth spec: each dim must satisfy 0 < dim < ambient_dim")
    return D, dims, flags


def cmd_synth(args):
    D, dims, flags = _parse_synth_spec(_load_json(args.spec))
    rng = np.random.default_rng(args.seed)
    model = random_affine_union(rng, D, dims, affine_flags=flags)
    samples = sample_union(model, args.per_subspace, seed=args.seed + 1,
                           radius=args.radius)
    points, labels = samples_to_arrays(samples)
    write_points_csv(args.out_points, points, labels)
    with open(args.out_model, "w") as fh:
        fh.write(_render_json(model_to_json(model)) + "\n")
    return 0


def cmd_check_transversal(args):
    model = _load_model(args.model_json)
    tol = _tolerances(args)
    if args.embed:
        affine = model if isinstance(model, UnionOfAffine) else model.to_affine()
        union = embed_affine_union(affine)
    elif isinstance(model, UnionOfAffine):
        # Documented behavior: without --embed only the linear parts are tested.
        union = UnionOfLinear([a.linear_part for a in model.subspaces])
    else:
        union = model
    report = check_transversality(union, tol)
    _emit_json(report.to_json(), args.out)
    return 0


def cmd_check_genpos(args):
    points, _ = read_points_csv(args.points_csv, labeled=args.labeled)
    model = _load_model(args.model_json)
    tol = _tolerances(args)
    degree = args.n if args.n is not None else model.n
    report = check_general_position(points, model, degree, tol)
    out = report.to_json()
    if isinstance(model, UnionOfAffine):
        embedded = check_general_position(
            homogenize_points(points), embed_affine_union(model), degree, tol
        )
        out["embedded"] = embedded.to_json()
        out["sides_agree"] = (
            report.in_general_position == embedded.in_general_position
        )
    _emit_json(out, args.out)
    return 0


def _fit_flat_from_points(points, affine, tol):
    if affine:
        centroid = points.mean(axis=0)
        basis = orthonormalize((points - centroid).T, tol)
        linear = LinearSubspace.from_basis(basis)
        return AffineSubspace(linear, centroid)
    basis = orthonormalize(points.T, tol)
    return LinearSubspace.from_basis(basis)


def _truth_models(args, points, labels, affine, tol):
    if args.truth_model:
        return _load_model(args.truth_model)
    subs = [
        _fit_flat_from_points(points[labels == lab], affine, tol)
        for lab in range(labels.max() + 1)
    ]
    return UnionOfAffine(subs) if affine else UnionOfLinear(subs)


def cmd_eval(args):
    result = _load_json(args.result_json)
    try:
        pred = np.asarray(result["labels"], dtype=int)
        models = model_from_json(result["models"])
    except (KeyError, ValueError, VarietalError) as exc:
        raise CLIInputError(f"{args.result_json}: invalid result JSON: {exc}") from exc
    points, truth = read_points_csv(args.truth_csv, labeled=True)
    if truth.shape[0] != pred.shape[0]:
        raise CLIInputError(
            f"label counts differ: result has {pred.shape[0]}, truth has {truth.shape[0]}"
        )
    tol = _tolerances(args)
    affine = isinstance(models, UnionOfAffine)
    truth_models = _truth_models(args, points, truth, affine, tol)

    n_true = int(truth.max()) + 1
    n_pred = int(pred.max()) + 1
    confusion = np.zeros((n_true, n_pred), dtype=int)
    for t, p in zip(truth, pred):
        confusion[t, p] += 1
    rows, cols = linear_sum_assignment(-confusion)
    matched = confusion[rows, cols].sum()
    error = 1.0 - matched / truth.shape[0]

    angles = []
    translation_errors = []
    for t, p in zip(rows, cols):
        true_sub = truth_models.subspaces[t]
        pred_sub = models.subspaces[p]
        if affine:
            angles.append(largest_principal_angle(
                true_sub.linear_part.basis, pred_sub.linear_part.basis))
            B = true_sub.linear_part.complement
            delta = B @ (B.T @ pred_sub.translation) - true_sub.translation
            translation_errors.append(float(np.linalg.norm(delta)))
        else:
            angles.append(largest_principal_angle(true_sub.basis, pred_sub.basis))

    _emit_json(
        {
            "clustering_error": float(error),
            "per_cluster_angles": angles,
            "translation_errors": translation_errors,
        },
        args.out,
    )
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _add_tolerance_flags(p):
    p.add_argument("--rank-rtol", type=float, default=DEFAULT_TOL.rank_rtol)
    p.add_argument("--angle-tol", type=float, default=DEFAULT_TOL.angle_tol)
    p.add_argument("--residual-tol", type=float, default=DEFAULT_TOL.residual_tol)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="varietal",
        description="Algebraic clustering of unions of linear and affine subspaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster points from a CSV file")
    p.add_argument("points_csv")
    p.add_argument("--n", type=int, default=None, help="number of subspaces")
    p.add_argument("--degree", type=int, default=None,
                   help="vanishing-polynomial degree (defaults to --n)")
    p.add_argument("--affine", action="store_true",
                   help="treat subspaces as affine (homogeneous-coordinate lift)")
    p.add_argument("--labeled", action="store_true",
                   help="input CSV carries a trailing label column to ignore")
    p.add_argument("--grouping-angle", type=float, default=1e-3)
    p.add_argument("--out", default=None, help="write the result JSON here")
    p.add_argument("--out-basis", default=None,
                   help="also write the fitted vanishing polynomials as JSON")
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("synth", help="generate a random union and samples")
    p.add_argument("--spec", required=True, help="JSON file with ambient_dim/dims/affine")
    p.add_argument("--per-subspace", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--out-points", required=True)
    p.add_argument("--out-model", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("check-transversal", help="certify transversality of a model")
    p.add_argument("model_json")
    p.add_argument("--embed", action="store_true",
                   help="check the homogeneous-coordinate lift of the model")
    p.add_argument("--out", default=None)
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_check_transversal)

    p = sub.add_parser("check-genpos", help="certify points are in general position")
    p.add_argument("points_csv")
    p.add_argument("model_json")
    p.add_argument("--n", type=int, default=None,
                   help="degree (defaults to the model's subspace count)")
    p.add_argument("--labeled", action="store_true")
    p.add_argument("--out", default=None)
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_check_genpos)

    p = sub.add_parser("eval", help="score a clustering result against ground truth")
    p.add_argument("result_json")
    p.add_argument("truth_csv", help="labeled CSV with the true assignments")
    p.add_argument("--truth-model", default=None,
                   help="model JSON with the true subspaces (otherwise fit from truth)")
    p.add_argument("--out", default=None)
    _add_tolerance_flags(p)
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GroupingFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TooFewPoints as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PointsOffModel as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except VarietalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
