"""Batch front-end: run experiments from a config file, emit CSV/JSON/plotdata.

Commands: spectrum, eigenfunction, asymptotics, localize, flea, verify.
Exit codes: 0 ok, 2 config error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import asymptotics as asy
from . import localization as loc
from . import steklov as stk
from . import sturm
from .config import ExperimentConfig, load_config
from .errors import ConfigError, SpectralError
from .extscalar import ExtScalar


def _g17(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x:.17g}"


def _write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_g17(v) if isinstance(v, float) or v is None else str(v)
                              for v in row) + "\n")


def _write_json(path: str, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _write_plotdata(path: str, xs, ys) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{_g17(float(x))} {_g17(float(y))}\n")


def _ext_json(v: ExtScalar) -> dict:
    return {"sign": v.sign, "significand": v.significand, "exponent": v.exponent}


def _run_int(cfg: ExperimentConfig, key: str, default: int) -> int:
    try:
        return int(cfg.run.get(key, default))
    except ValueError as exc:
        raise ConfigError(f"[run] {key} must be an integer") from exc


def _run_float(cfg: ExperimentConfig, key: str, default: float) -> float:
    try:
        return float(cfg.run.get(key, default))
    except ValueError as exc:
        raise ConfigError(f"[run] {key} must be a number") from exc


# ----------------------------------------------------------------------
# commands


def cmd_spectrum(cfg: ExperimentConfig, out: str, formats, workers: int) -> None:
    p = cfg.profile
    header = ["m", "mu", "multiplicity", "A", "B_log_magnitude", "B_sign", "C",
              "lambda_plus", "lambda_minus", "gap", "splitting_lower_bound"]
    rows, json_rows = [], []
    for m, (mu, mult) in enumerate(cfg.spectrum):
        try:
            block = stk.dn_block(p, mu)
            pair = stk.steklov_pair(block)
        except SpectralError as exc:
            raise SpectralError(f"mode {m} (mu={mu:.6g}): {exc}") from exc
        bound = stk.splitting_lower_bound(p, mu)
        row = [m, float(mu), mult, block.a_entry, block.b_ext.ln_mag,
               block.b_ext.sign, block.c_entry, pair.lambda_plus,
               pair.lambda_minus, pair.gap, bound]
        rows.append(row)
        json_rows.append({
            "m": m, "mu": float(mu), "multiplicity": mult,
            "A": block.a_entry, "B_log_magnitude": block.b_ext.ln_mag,
            "B_sign": block.b_ext.sign, "C": block.c_entry,
            "lambda_plus": pair.lambda_plus, "lambda_minus": pair.lambda_minus,
            "gap": pair.gap, "splitting_lower_bound": bound,
            "B_ext": _ext_json(block.b_ext),
        })
    if "csv" in formats:
        _write_csv(os.path.join(out, "spectrum.csv"), header, rows)
    if "json" in formats:
        _write_json(os.path.join(out, "spectrum.json"), {"rows": json_rows})
    if "plotdata" in formats:
        for branch, idx in (("plus", 7), ("minus", 8)):
            _write_plotdata(os.path.join(out, f"lambda_all_{branch}.dat"),
                            [r[1] for r in rows], [r[idx] for r in rows])
    print(f"spectrum: wrote {len(rows)} modes to {out}")


def cmd_eigenfunction(cfg: ExperimentConfig, out: str, formats, workers: int) -> None:
    p = cfg.profile
    npts = _run_int(cfg, "grid_points", 1025)
    grid = np.linspace(0.0, 1.0, npts)
    branches = [b.strip() for b in cfg.run.get("branches", "plus,minus").split(",") if b.strip()]
    normalization = cfg.run.get("normalization", "boundary-L2")
    modes_req = cfg.run.get("modes", "all")
    if modes_req.strip() == "all":
        modes = list(range(len(cfg.spectrum)))
    else:
        modes = [int(t) for t in modes_req.replace(",", " ").split()]

    written = 0
    for m in modes:
        mu, _ = cfg.spectrum.entries[m]
        for branch in branches:
            try:
                tr = stk.eigenfunction_trace(p, mu, branch, grid, normalization=normalization)
            except SpectralError as exc:
                raise SpectralError(f"mode {m} (mu={mu:.6g}, {branch}): {exc}") from exc
            lnw = tr.log_magnitudes()
            signs = [v.sign for v in tr.w_values]
            native = tr.native()
            if "csv" in formats:
                rows = [[float(x), float(l), s, float(wv)]
                        for x, l, s, wv in zip(grid, lnw, signs, native)]
                _write_csv(os.path.join(out, f"trace_{m}_{branch}.csv"),
                           ["x", "ln_abs_w", "sign", "w_native_if_safe"], rows)
            if "json" in formats:
                _write_json(os.path.join(out, f"trace_{m}_{branch}.json"), {
                    "m": m, "mu": float(mu), "branch": branch,
                    "normalization": tr.normalization,
                    "bulk_norm": tr.bulk_norm_value,
                    "x": [float(v) for v in grid],
                    "ln_abs_w": [float(v) for v in lnw],
                    "sign": signs,
                })
            if "plotdata" in formats:
                _write_plotdata(os.path.join(out, f"lnw_{m}_{branch}.dat"), grid, lnw)
            written += 1
    print(f"eigenfunction: wrote {written} traces to {out}")


def cmd_asymptotics(cfg: ExperimentConfig, out: str, formats, workers: int) -> None:
    p = cfg.profile
    eps = _run_float(cfg, "epsilon", 0.05)
    fit_lo = _run_float(cfg, "fit_lo", 10.0)
    fit_hi = _run_float(cfg, "fit_hi", 40.0)
    model = asy.case_constants(p, epsilon=eps)

    header = ["m", "mu", "gap", "gap_pred", "gap_ratio", "lambda_plus",
              "lambda_plus_pred", "lambda_minus", "lambda_minus_pred",
              "gap_lower_pred", "gap_upper_pred"]
    rows = []
    gaps = []
    for m, (mu, _) in enumerate(cfg.spectrum):
        try:
            pair = stk.steklov_pair(stk.dn_block(p, mu))
        except SpectralError as exc:
            raise SpectralError(f"mode {m} (mu={mu:.6g}): {exc}") from exc
        pred = asy.predict(model, mu)
        ratio = pair.gap / pred.gap if pred.gap else None
        rows.append([m, float(mu), pair.gap, pred.gap, ratio, pair.lambda_plus,
                     pred.lambda_plus, pair.lambda_minus, pred.lambda_minus,
                     pred.gap_lower, pred.gap_upper])
        if mu > 0:
            gaps.append((mu, pair.gap_ext))
    fit = None
    try:
        fit = asy.gap_rate_fit(gaps, window=(fit_lo, fit_hi))
    except ValueError:
        pass

    model_info = {"case": model.tag, "k": model.k, "a": model.a,
                  "constant": model.constant, "alpha_exponent": model.alpha_exponent,
                  "sign": model.sign}
    if "csv" in formats:
        path = os.path.join(out, "asymptotics.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# case={model.tag} k={model.k} a={model.a} "
                     f"constant={_g17(model.constant)}\n")
            if fit:
                fh.write(f"# gap_rate={_g17(fit.rate)} exponential={fit.exponential}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_g17(v) if isinstance(v, float) or v is None else str(v)
                                  for v in row) + "\n")
    if "json" in formats:
        _write_json(os.path.join(out, "asymptotics.json"), {
            "model": model_info,
            "gap_rate_fit": None if fit is None else
            {"rate": fit.rate, "intercept": fit.intercept,
             "n_points": fit.n_points, "exponential": fit.exponential},
            "rows": [dict(zip(header, r)) for r in rows],
        })
    if "plotdata" in formats:
        _write_plotdata(os.path.join(out, "gap_all_modes.dat"),
                        [math.sqrt(r[1]) for r in rows if r[1] > 0],
                        [-math.log(r[2]) if r[2] > 0 else math.inf
                         for r in rows if r[1] > 0])
    print(f"asymptotics: case {model.tag}, wrote {len(rows)} modes to {out}")


def cmd_localize(cfg: ExperimentConfig, out: str, formats, workers: int) -> None:
    p = cfg.profile
    npts = _run_int(cfg, "grid_points", 1025)
    thr = _run_float(cfg, "both_threshold", loc.BOTH_THRESHOLD)
    eps = _run_float(cfg, "epsilon", 0.05)
    grid = np.linspace(0.0, 1.0, npts)
    model = asy.case_constants(p, epsilon=eps)

    header = ["m", "mu", "branch", "dominant", "mass_split", "ln_w0", "ln_w1",
              "decay_rate_0", "decay_rate_1", "residual_decay_rate", "bound_residual"]
    rows = []
    for m, (mu, _) in enumerate(cfg.spectrum):
        for branch in ("plus", "minus"):
            try:
                tr = stk.eigenfunction_trace(p, mu, branch, grid)
                template = loc.bound_template(model, branch, mu) if mu > 0 else None
                rep = loc.classify(tr, p, both_threshold=thr, template=template)
            except SpectralError as exc:
                raise SpectralError(f"mode {m} (mu={mu:.6g}, {branch}): {exc}") from exc
            rows.append([m, float(mu), branch, rep.dominant, rep.mass_split,
                         rep.endpoint_log_magnitudes[0], rep.endpoint_log_magnitudes[1],
                         rep.decay_rate_0, rep.decay_rate_1,
                         rep.residual_decay_rate, rep.bound_residual])
    if "csv" in formats:
        _write_csv(os.path.join(out, "localize.csv"), header, rows)
    if "json" in formats:
        _write_json(os.path.join(out, "localize.json"),
                    {"case": model.tag, "rows": [dict(zip(header, r)) for r in rows]})
    if "plotdata" in formats:
        _write_plotdata(os.path.join(out, "mass_split_all_both.dat"),
                        [r[1] for r in rows if r[2] == "plus"],
                        [r[4] for r in rows if r[2] == "plus"])
    print(f"localize: wrote {len(rows)} rows to {out}")


def cmd_flea(cfg: ExperimentConfig, out: str, formats, workers: int) -> None:
    p = cfg.profile
    npts = _run_int(cfg, "grid_points", 1025)
    bump = loc.FleaBump(
        kind=cfg.run.get("bump_kind", "boundary-value"),
        start=_run_float(cfg, "bump_start", 0.25),
        width=_run_float(cfg, "bump_width", 0.1),
        sharpness=_run_float(cfg, "bump_sharpness", 0.1),
    )
    deltas_text = cfg.run.get("deltas", "0, 1e-4, 1e-3")
    deltas = [float(t) for t in deltas_text.replace(",", " ").split()]
    try:
        report = loc.flea_sweep(p, bump, deltas, cfg.spectrum,
                                grid_points=npts, workers=workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    header = ["delta", "m", "mu", "dominant_plus", "dominant_minus",
              "gap", "gap_log", "coupling_log"]
    rows = [[r.delta, r.mode_index, r.mu, r.dominant_plus, r.dominant_minus,
             r.gap, r.gap_log, r.coupling_log] for r in report.results]
    if "csv" in formats:
        _write_csv(os.path.join(out, "flea.csv"), header, rows)
        _write_csv(os.path.join(out, "flea_mstar.csv"), ["delta", "m_star"],
                   [[d, "" if report.m_star[d] is None else report.m_star[d]]
                    for d in report.deltas])
    if "json" in formats:
        _write_json(os.path.join(out, "flea.json"), {
            "deltas": report.deltas,
            "m_star": {str(d): report.m_star[d] for d in report.deltas},
            "predictions": {str(d): report.predictions[d] for d in report.deltas},
            "rows": [dict(zip(header, r)) for r in rows],
        })
    if "plotdata" in formats:
        for d in report.deltas:
            sel = [r for r in report.results if r.delta == d]
            tag = _g17(d).replace(".", "p").replace("-", "m")
            _write_plotdata(os.path.join(out, f"gaplog_{tag}_both.dat"),
                            [math.sqrt(r.mu) for r in sel if r.mu > 0],
                            [-r.gap_log for r in sel if r.mu > 0])
    print(f"flea: wrote {len(rows)} rows to {out}; m* = {report.m_star}")


def cmd_verify(cfg: ExperimentConfig, out: str, formats, workers: int) -> int:
    from .verify import run_verification

    results = run_verification()
    width = max(len(r.name) for r in results)
    all_ok = True
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        all_ok &= r.ok
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    print(f"verify: {'all checks passed' if all_ok else 'FAILURES present'}")
    return 0 if all_ok else 3


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "eigenfunction": cmd_eigenfunction,
    "asymptotics": cmd_asymptotics,
    "localize": cmd_localize,
    "flea": cmd_flea,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="warpsteklov",
        description="Steklov spectra of warped products: batch computations",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--format", choices=["csv", "json", "plotdata"], default=None,
                        help="restrict output to a single format")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.command)
        out = args.out or cfg.out_dir
        formats = (args.format,) if args.format else cfg.formats
        os.makedirs(out, exist_ok=True)
        result = _COMMANDS[args.command](cfg, out, formats, args.workers)
        return int(result) if result is not None else 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpectralError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
