"""Config-driven experiment runner.

A config is a JSON object naming a pipeline, the channels it acts on and its
numeric parameters.  Each run writes ``report.json`` (config, seed, summary
and rows at full precision) and ``report.csv`` (the rows, 12 significant
digits).  Exit codes: 0 success, 1 malformed config, 2 a checked invariant
failed, 3 a size guard refused the run.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import constants as C
from .channels import channel_from_json, tensor_power
from .coding import monte_carlo_fidelity, one_shot_bound, truncate_channel
from .compound import (
    adapted_cardinality_bound,
    bsst_check,
    build_adapted_net,
    compound_capacity_lower,
    convert_code,
    discriminate,
    family,
    fit_decay,
    min_output_eigenvalue,
    repetition_code,
)
from .errors import GuardError, HypothesisError, InvariantViolation
from .information import coherent_information, entanglement_fidelity, entropy, optimize_code_recovery
from .qmat import density, maximally_mixed
from .typicality import typical_projector

PIPELINES = ("info", "typicality", "one-shot", "net", "discriminate", "convert", "capacity", "bsst")
DEFAULT_GUARDS = {"max_dim": 4096, "max_mask_dim": 2**22, "max_l": C.TYPICAL_MAX_L}


class ConfigError(ValueError):
    pass


# ----------------------------------------------------------------------------
# config parsing


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _channels(cfg: dict, base: Path):
    if "family" in cfg and isinstance(cfg["family"], str):
        spec = json.loads((base / cfg["family"]).read_text())
    else:
        spec = cfg.get("channels", cfg.get("family"))
    if isinstance(spec, dict) and "channels" in spec:
        spec = spec["channels"]
    if not isinstance(spec, list) or not spec:
        raise ConfigError("need a non-empty channel list")
    try:
        return [channel_from_json(c) for c in spec]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad channel spec: {exc}") from exc


def _state(spec, d: int):
    if spec is None or spec == "maximally_mixed":
        return maximally_mixed(d)
    if isinstance(spec, dict) and "diag" in spec:
        return density(np.diag(np.asarray(spec["diag"], dtype=float)))
    return density(np.asarray(spec, dtype=complex))


def _states(spec) -> list:
    """A single state spec or a list of them."""
    if isinstance(spec, list) and spec and isinstance(spec[0], dict):
        return spec
    return [spec]


def _list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _need(cfg, key):
    if key not in cfg:
        raise ConfigError(f"missing parameter {key!r}")
    return cfg[key]


def _guards(cfg):
    return {**DEFAULT_GUARDS, **cfg.get("guards", {})}


def _largest_block(cfg: dict, d: int) -> int:
    pipe = cfg["pipeline"]
    if pipe in ("typicality", "bsst", "one-shot", "capacity"):
        return d ** max(_list(cfg.get("l", 1)))
    if pipe == "discriminate":
        return d ** max(_list(cfg.get("m", 1)))
    if pipe == "convert":
        return d ** (cfg.get("m", 1) + cfg.get("t", 1))
    if pipe == "net":
        return d ** max(_list(cfg.get("l", 1)))
    return d


def check_config(cfg: dict, base: Path = Path(".")) -> dict:
    """Dry-run checks; raises ConfigError or GuardError, otherwise returns a size estimate."""
    if "seed" not in cfg:
        raise ConfigError("seed is mandatory")
    if cfg.get("pipeline") not in PIPELINES:
        raise ConfigError(f"pipeline must be one of {PIPELINES}")
    if cfg["pipeline"] == "net":
        fam = _need(cfg, "family")
        if not isinstance(fam, dict) or "name" not in fam:
            raise ConfigError("net pipeline needs family {name, interval}")
        d = 2
    elif cfg["pipeline"] == "typicality":
        d = max(_state(s, 2).shape[0] for s in _states(_need(cfg, "rho")))
    else:
        d = _channels(cfg, base)[0].in_dim
    guards = _guards(cfg)
    ls = _list(cfg.get("l", 1))
    if max(ls) > guards["max_l"]:
        raise GuardError(f"l = {max(ls)} exceeds the block-length guard {guards['max_l']}")
    dim = _largest_block(cfg, d)
    # typicality only builds an eigenvalue mask, never a dense block
    cap = guards["max_mask_dim"] if cfg["pipeline"] == "typicality" else guards["max_dim"]
    if dim > cap:
        raise GuardError(f"block dimension {dim} exceeds the guard {cap}")
    return {"status": "ok", "block_dim": dim, "dense_bytes": 16 * dim * dim}


# ----------------------------------------------------------------------------
# pipelines


def _info(cfg, chans, seed, threads):
    rows = []
    for i, ch in enumerate(chans):
        rho = _state(cfg.get("rho"), ch.in_dim)
        row = {"channel": i, "I_c": coherent_information(rho, ch), "S_in": entropy(rho)}
        row["F_e"] = entanglement_fidelity(rho, ch) if ch.in_dim == ch.out_dim else math.nan
        rows.append(row)
    return {}, rows


def _typicality(cfg, chans, seed, threads):
    rows = []
    for r, spec in enumerate(_states(cfg["rho"])):
        rho = _state(spec, 2)
        for l in _list(_need(cfg, "l")):
            for delta in _list(_need(cfg, "delta")):
                tspec, cert = typical_projector(rho, l, delta, cfg.get("c", C.TYPICAL_C))
                rows.append({"state": r, "l": l, "delta": delta, "rank": tspec.rank, "mass": cert.mass,
                             "mass_bound": cert.mass_bound, "item1": cert.item1, "item2": cert.item2,
                             "item3": cert.item3_upper})
    return {}, rows


def _one_shot(cfg, chans, seed, threads):
    k = _need(cfg, "k")
    l = cfg.get("l", 1)
    d = chans[0].in_dim
    if "delta" in cfg:
        used = [truncate_channel(ch, maximally_mixed(d), l, cfg["delta"]) for ch in chans]
    else:
        used = [tensor_power(ch, l) for ch in chans]
    pi_g = maximally_mixed(d**l)
    report = one_shot_bound(used, k, pi_g)
    summary = {"bound": report.bound, "trace": report.trace, "hs_norms": list(report.hs_norms),
               "n_kraus": list(report.n_kraus), "vacuous": report.vacuous}
    rows = []
    trials = cfg.get("trials", 0)
    if trials:
        mc = monte_carlo_fidelity(used, k, trials, seed, threads=threads, iters=cfg.get("iters", 500))
        summary.update(mean=mc.mean, std=mc.std, stderr=mc.stderr,
                       decoupling_violations=sum(not r.decoupling_holds for r in mc.records))
        rows = [{"trial": r.trial, "seed": r.seed, "F_e": r.fidelity, "w": r.w, "gap": r.gap} for r in mc.records]
    return summary, rows


def _net(cfg, chans, seed, threads):
    fam_cfg = cfg["family"]
    fam = family(fam_cfg["name"], *fam_cfg["interval"])
    rows = []
    for tau in _list(_need(cfg, "tau")):
        net = build_adapted_net(fam, tau)
        eig = min(min_output_eigenvalue(m, seed=seed) for m in net.members)
        if eig < tau / (2 * net.members[0].out_dim) - 1e-12:
            raise InvariantViolation("mixed net member output below tau/(2d')")
        rows.append({"tau": tau, "size": len(net), "log2_size": net.log2_size,
                     "log2_bound": adapted_cardinality_bound(tau, 2, 2), "grid_step": net.grid_step,
                     "covering_radius": net.covering_radius, "min_output_eig": eig})
    return {}, rows


def _discriminate(cfg, chans, seed, threads):
    ms = _list(_need(cfg, "m"))
    probe = cfg.get("probe")
    rows, worst = [], []
    for m in ms:
        rep = discriminate(chans, m, probe=probe, seed=seed)
        if not np.allclose(sum(rep.povm), np.eye(rep.povm[0].shape[0]), atol=1e-9):
            raise InvariantViolation("POVM is not complete")
        worst.append(rep.worst)
        row = {"m": m, "average": rep.average, "worst": rep.worst}
        row.update({f"success_{i}": s for i, s in enumerate(rep.per_member)})
        rows.append(row)
    f = fit_decay(ms, worst, len(chans)) if len(ms) > 1 and max(worst) < 1 else math.nan
    return {"f": f, "monotone": bool(np.all(np.diff(worst) >= -1e-12))}, rows


def _convert(cfg, chans, seed, threads):
    m, t = _need(cfg, "m"), _need(cfg, "t")
    code = repetition_code(t, cfg.get("code_basis", "x"))
    recs = [optimize_code_recovery(code.isometry, tensor_power(ch, t), cfg.get("iters", 500)).recovery.to_channel()
            for ch in chans]
    rep = discriminate(chans, m, probe=cfg.get("probe"), seed=seed) if len(chans) > 1 else None
    res = convert_code(code, recs, chans, m, t, rep)
    if not np.allclose(res.combined, res.factorized, atol=1e-9):
        raise InvariantViolation("end-to-end and factorized combined fidelities disagree")
    rows = [{"member": j, "combined": res.combined[j], "factorized": res.factorized[j],
             "product_bound": res.product_bound[j], "success": res.success[j, j], "informed": res.informed[j, j],
             "holds": bool(res.holds[j])} for j in range(len(chans))]
    return {"all_hold": bool(res.holds.all())}, rows


def _capacity(cfg, chans, seed, threads):
    rows = []
    for l in _list(cfg.get("l", 1)):
        est = compound_capacity_lower(chans, l, restarts=cfg.get("restarts", 4), seed=seed)
        rows.append({"l": l, "value": est.value, "per_use": est.value / l, "best_start": max(est.start_values)})
    return {"best_per_use": max(r["per_use"] for r in rows)}, rows


def _bsst(cfg, chans, seed, threads):
    rho = _state(_need(cfg, "rho"), chans[0].in_dim)
    tab = bsst_check(rho, chans, _list(_need(cfg, "l")), _need(cfg, "delta"), cfg.get("tau"))
    rows = [dict(r.__dict__) for r in tab]
    dev = [r.deviation for r in tab]
    within = all(r.deviation <= r.envelope for r in tab)
    return {"monotone": bool(np.all(np.diff(dev) < 0)), "within_envelope": within}, rows


RUNNERS = {"info": _info, "typicality": _typicality, "one-shot": _one_shot, "net": _net,
           "discriminate": _discriminate, "convert": _convert, "capacity": _capacity, "bsst": _bsst}


# ----------------------------------------------------------------------------
# reports


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_reports(out: Path, cfg: dict, seed: int, summary: dict, rows: list, wall: float) -> None:
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(cfg, sort_keys=True)
    report = {
        "config": cfg,
        "seed": seed,
        "config_hash": hashlib.sha256(text.encode()).hexdigest()[:16],
        "version": __version__,
        "summary": summary,
        "rows": rows,
        "wall_clock_s": wall,
    }
    (out / "report.json").write_text(json.dumps(_jsonable(report), indent=2))
    with open(out / "report.csv", "w", newline="") as fh:
        if rows:
            keys = list(rows[0])
            wr = csv.writer(fh)
            wr.writerow(keys)
            for r in rows:
                wr.writerow([_cell(r.get(k, "")) for k in keys])


def run(cfg: dict, out: Path, base: Path = Path("."), threads: int = 1) -> tuple:
    check_config(cfg, base)
    chans = _channels(cfg, base) if cfg["pipeline"] not in ("net", "typicality") else None
    start = time.perf_counter()
    summary, rows = RUNNERS[cfg["pipeline"]](cfg, chans, int(cfg["seed"]), threads)
    write_reports(out, cfg, int(cfg["seed"]), summary, rows, time.perf_counter() - start)
    return summary, rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qcompound", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, help="experiment config (JSON)")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--out", default="out", help="report directory")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--validate", action="store_true", help="dry-run guard checks only")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        base = Path(args.config).resolve().parent
        if args.validate:
            print(json.dumps(check_config(cfg, base)))
            return 0
        summary, _ = run(cfg, Path(args.out), base, args.threads)
        print(json.dumps(_jsonable(summary)))
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except GuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return 3
    except (InvariantViolation, HypothesisError, AssertionError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
