"""Command-line interface: ``tailcompat <subcommand> ...``.

Exit codes: 0 success, 1 failed ``verify``, 2 domain error (bad matrix,
parameter, or model), 3 file-level error (missing, unreadable, malformed).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bernoulli import (
    ar1_x,
    equicorrelation_x,
    gamma_partition_x,
    ma1_x,
    substochastic_x,
)
from .copulas import (
    Clayton,
    Comonotone,
    CopulaModel,
    Gaussian,
    Independence,
    LiebscherProduct,
    SModel,
    StochRep,
    SurvivalMarshallOlkin,
    gaussian_rho_from_kendall,
    model_from_dict,
    sample,
)
from .errors import BadModel, BadParam, DomainError, FileFormatError
from .estimator import empirical_tail_matrix
from .io import (
    read_json,
    read_matrix_csv,
    read_rows_csv,
    read_samples_csv,
    write_json,
    write_matrix_csv,
    write_samples_csv,
)
from .matrix import psd_necessary_check, validate_tail_candidate
from .solver import (
    ConeDecomposition,
    MembershipVerdict,
    Status,
    dd_check,
    dd_decompose,
    decomposition_to_bernoulli,
    membership,
    verify_decomposition,
)

PLOT_ROWS = 2000
VERIFY_ABS_TOL = 0.03
VERIFY_SE_MULT = 4.0

FAMILIES = (
    "equicorr", "ar1", "ma1", "gamma", "smodel-from-decomposition", "stochrep", "liebscher",
    "independence", "comonotone", "clayton", "survival-mo", "gaussian",
)


# -- helpers -----------------------------------------------------------------

def _emit(data: dict, path) -> None:
    if path:
        write_json(path, data)
    else:
        json.dump(data, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


def _load_model(path) -> CopulaModel:
    data = read_json(path)
    if not isinstance(data, dict):
        raise BadModel(f"{path}: model JSON must be an object")
    return model_from_dict(data)


def _number(text: str):
    """Parse '0.25' or '1/3'; the result is a Fraction so callers choose precision."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise BadParam(f"family {args.family!r} requires {', '.join(missing)}")


def _unit_diagonal(c: ConeDecomposition) -> ConeDecomposition:
    """Absorb float diagonal drift into the singleton weights so the margins come out equal."""
    if c.exact:
        return c
    diag = np.diag(np.asarray(c.matrix(), dtype=float))
    terms = dict(c.terms)
    for i in range(c.dim):
        e = tuple(1 if k == i else 0 for k in range(c.dim))
        terms[e] = terms.get(e, 0.0) + (1.0 - diag[i])
    if any(w < -1e-9 for w in terms.values()):
        return c
    return ConeDecomposition(c.dim, tuple((b, max(w, 0.0)) for b, w in terms.items()))


def _decompose(lam, exact: bool) -> tuple[ConeDecomposition, str]:
    if dd_check(lam):
        return dd_decompose(lam.values if exact else lam.to_float()), "dd"
    verdict = membership(lam, exact=exact)
    if verdict.status != Status.COMPATIBLE:
        raise BadParam(f"matrix has no cone decomposition: {verdict.status} ({verdict.certificate_note})")
    return verdict.decomposition, "lp"


# -- subcommands -------------------------------------------------------------

def cmd_check(args) -> int:
    raw = read_matrix_csv(args.matrix, exact=args.exact)
    lam = validate_tail_candidate(raw)
    if not psd_necessary_check(lam):
        verdict = MembershipVerdict(Status.INCOMPATIBLE, None, "matrix has a negative eigenvalue")
        gate = "psd"
    elif dd_check(lam):
        dec = dd_decompose(lam.values)
        resid = verify_decomposition(dec, lam.values)
        verdict = MembershipVerdict(
            Status.COMPATIBLE, dec, "diagonally dominant: closed-form decomposition", float(resid), 0.0
        )
        gate = "dd"
    else:
        verdict = membership(lam, exact=args.exact)
        gate = "lp"
    out = verdict.to_dict()
    out["gate"] = gate
    _emit(out, args.json)
    return 0


def _build_model(args) -> CopulaModel:
    fam = args.family
    if fam in ("equicorr", "ar1", "ma1", "gamma", "independence", "comonotone", "clayton", "gaussian"):
        _require(args, "d")
    d = args.d
    if fam in ("equicorr", "ar1", "ma1"):
        _require(args, "alpha")
        alpha = float(args.alpha)
        builder = {"equicorr": equicorrelation_x, "ar1": ar1_x, "ma1": ma1_x}[fam]
        x = builder(d, alpha)
        p = float(x.mean()[0])
        if p == 0.0:
            # the mixture degenerates (no component ever routed to the shared driver)
            return Independence(d)
        return SModel(x, p)
    if fam == "gamma":
        _require(args, "alpha")
        x = gamma_partition_x(d, float(args.alpha))
        if args.cv_kendall is None:
            cv = Independence(d)
        else:
            cv = Gaussian.equicorrelated(d, gaussian_rho_from_kendall(float(args.cv_kendall)))
        return StochRep(x, Independence(1), cv)
    if fam == "smodel-from-decomposition":
        _require(args, "matrix")
        lam = validate_tail_candidate(read_matrix_csv(args.matrix, exact=args.exact))
        dec, _ = _decompose(lam, args.exact)
        x, p = decomposition_to_bernoulli(_unit_diagonal(dec))
        return SModel(x, p)
    if fam == "stochrep":
        _require(args, "q", "cu")
        x = substochastic_x(read_rows_csv(args.q))
        cu = _load_model(args.cu)
        cv = _load_model(args.cv) if args.cv else Independence(x.rows)
        return StochRep(x, cu, cv)
    if fam == "liebscher":
        if not args.factor:
            raise BadParam("family 'liebscher' requires at least one --factor model.json")
        return LiebscherProduct(tuple(_load_model(f) for f in args.factor))
    if fam == "independence":
        return Independence(d)
    if fam == "comonotone":
        return Comonotone(d)
    if fam == "clayton":
        _require(args, "theta")
        return Clayton(d, float(args.theta))
    if fam == "survival-mo":
        _require(args, "alpha1", "alpha2")
        return SurvivalMarshallOlkin(float(args.alpha1), float(args.alpha2))
    if fam == "gaussian":
        _require(args, "rho")
        return Gaussian.equicorrelated(d, float(args.rho))
    raise BadParam(f"unknown family {fam!r}")


def cmd_construct(args) -> int:
    model = _build_model(args)
    tail = model.tail_matrix()
    out = Path(args.out)
    tail_path = Path(args.matrix_out) if args.matrix_out else out.with_suffix(".tail.csv")
    write_json(out, model.to_dict())
    write_matrix_csv(tail_path, tail)
    return 0


def cmd_sample(args) -> int:
    if args.n < 1:
        raise BadParam(f"n must be at least 1, got {args.n}")
    model = _load_model(args.model)
    batch = sample(model, args.n, args.seed, threads=args.threads)
    out = Path(args.out)
    write_samples_csv(out, batch)
    write_json(out.with_name(out.name + ".seed.json"), {"seed": args.seed, "n": args.n, "model": str(args.model)})
    if args.plot_data:
        write_samples_csv(args.plot_data, batch.values[:PLOT_ROWS])
    return 0


def cmd_estimate(args) -> int:
    batch = read_samples_csv(args.samples)
    est = empirical_tail_matrix(batch, args.k)
    out = Path(args.out)
    write_matrix_csv(out, est.matrix)
    write_json(out.with_suffix(".json"), {"n": est.n, "k": est.threshold_k, "se_max": est.se_max})
    return 0


def cmd_verify(args) -> int:
    model = _load_model(args.model)
    if args.target_matrix:
        target = validate_tail_candidate(read_matrix_csv(args.target_matrix)).to_float()
        if target.shape[0] != model.dim:
            raise BadParam(f"target matrix has d={target.shape[0]}, model has d={model.dim}")
    else:
        target = model.tail_matrix().to_float()
    if args.target is not None:
        target = np.full((model.dim, model.dim), float(args.target))
        np.fill_diagonal(target, 1.0)
    if args.n < 1:
        raise BadParam(f"n must be at least 1, got {args.n}")
    est = empirical_tail_matrix(sample(model, args.n, args.seed, threads=args.threads), args.k)
    gap = np.abs(est.matrix - target)
    allowed = np.maximum(VERIFY_ABS_TOL, VERIFY_SE_MULT * est.standard_error)
    passed = bool(np.all(gap <= allowed))
    report = {
        "pass": passed,
        "n": est.n,
        "k": est.threshold_k,
        "seed": args.seed,
        "max_gap": float(gap.max()),
        "se_max": est.se_max,
        "analytic": target.tolist(),
        "empirical": est.matrix.tolist(),
    }
    _emit(report, args.json)
    return 0 if passed else 1


def cmd_decompose(args) -> int:
    lam = validate_tail_candidate(read_matrix_csv(args.matrix, exact=args.exact))
    if args.method == "dd":
        dec, method = dd_decompose(lam.values), "dd"
    elif args.method == "lp":
        verdict = membership(lam, exact=args.exact)
        if verdict.status != Status.COMPATIBLE:
            raise BadParam(f"matrix has no cone decomposition: {verdict.status} ({verdict.certificate_note})")
        dec, method = verdict.decomposition, "lp"
    else:
        dec, method = _decompose(lam, args.exact)
    resid = verify_decomposition(dec, lam.values)
    out = {
        "method": method,
        "dim": dec.dim,
        "residual": float(resid),
        "total_weight": float(dec.total_weight()),
        "decomposition": dec.to_list(),
    }
    if dec.exact:
        out["exact_weights"] = [str(w) for _, w in dec.terms]
    _emit(out, args.json)
    return 0


# -- parser ------------------------------------------------------------------

def _global_flags(parser, defaults: bool) -> None:
    kw = {} if defaults else {"default": argparse.SUPPRESS}
    parser.add_argument("--seed", type=int, help="random seed (u64)", **({"default": 0} if defaults else kw))
    parser.add_argument("--threads", type=int, help="sampling threads", **({"default": 1} if defaults else kw))
    parser.add_argument(
        "--exact", action="store_true", help="rational arithmetic (d <= 10)",
        **({"default": False} if defaults else kw),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailcompat", description="Tail-dependence matrix toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, defaults=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, defaults=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="decide membership of a candidate matrix")
    p.add_argument("matrix", help="matrix CSV")
    p.add_argument("--json", help="write the verdict here instead of stdout")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", parents=[common], help="build a copula model with a given tail matrix")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--d", type=int)
    p.add_argument("--alpha", type=_number)
    p.add_argument("--theta", type=_number)
    p.add_argument("--alpha1", type=_number)
    p.add_argument("--alpha2", type=_number)
    p.add_argument("--rho", type=_number)
    p.add_argument("--cv-kendall", type=_number, help="gamma: Kendall tau of a Gaussian V instead of independence")
    p.add_argument("--matrix", help="smodel-from-decomposition: target tail matrix CSV")
    p.add_argument("--q", help="stochrep: substochastic matrix CSV (no header)")
    p.add_argument("--cu", help="stochrep: model JSON of the tail driver U")
    p.add_argument("--cv", help="stochrep: model JSON of the tail-independent V")
    p.add_argument("--factor", action="append", help="liebscher: factor model JSON (repeatable)")
    p.add_argument("--out", required=True, help="model JSON")
    p.add_argument("--matrix-out", help="analytic tail matrix CSV (default: <out>.tail.csv)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("sample", parents=[common], help="draw samples from a model")
    p.add_argument("model", help="model JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True, help="samples CSV")
    p.add_argument("--plot-data", help=f"also write the first {PLOT_ROWS} rows here")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", parents=[common], help="empirical tail matrix of samples")
    p.add_argument("samples", help="samples CSV")
    p.add_argument("--k", type=int, help="threshold rank (default ceil(n^0.4))")
    p.add_argument("--out", required=True, help="estimate CSV; metadata goes to the .json sibling")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", parents=[common], help="compare analytic and empirical tail matrices")
    p.add_argument("model", help="model JSON")
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--k", type=int)
    p.add_argument("--target", type=_number, help="common off-diagonal target instead of the analytic matrix")
    p.add_argument("--target-matrix", help="target matrix CSV instead of the analytic matrix")
    p.add_argument("--json", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", parents=[common], help="dump a cone decomposition")
    p.add_argument("matrix", help="matrix CSV")
    p.add_argument("--method", choices=("auto", "dd", "lp"), default="auto")
    p.add_argument("--json", help="write the decomposition here instead of stdout")
    p.set_defaults(func=cmd_decompose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        kind = "file format" if isinstance(exc, FileFormatError) else "I/O"
        print(f"{kind} error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
