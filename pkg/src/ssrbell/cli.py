"""Command-line front end.

Usage examples::

    ssrbell optimal-ref n=30 m=30
    ssrbell photonic threshold
    ssrbell witness --state-file ref.json
    ssrbell reproduce-all --seed 0 --out report.json

Commands and actions may be given positionally or with ``--command``;
``key=value`` words are accepted as aliases for the matching flags.

Exit codes: 0 success, 1 usage error, 2 contract or acceptance failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import claims
from .bell import PrincipalState, chsh_optimal, expectation_grid
from .errors import ContractError, PreconditionError, SizeError, StateValidationError
from .fock import FockCutoff, PureState
from .io import StateFileError, load_state
from .photonic import PhotonicSetup, optimality_scan, photonic_chsh_max, threshold_nbar
from .reference import (MinimalReference, is_separable_minimal, max_shift_expectation, max_v_separable_minimal,
                        minimal_to_density, optimal_product_reference, separable_ssr_reference)
from .siv import pure_siv, pure_siv_bob, vf_bound_minimal, vf_ensemble_upper_bound
from .ssr import compare_criteria, coherence_v, is_ssr_compliant

EXIT_OK, EXIT_USAGE, EXIT_CONTRACT, EXIT_IO = 0, 1, 2, 3

COMMANDS = ("witness", "chsh-scan", "minimal-ref", "optimal-ref", "siv-report", "photonic", "reproduce-all")
PHOTONIC_ACTIONS = ("threshold", "scan", "hessmo")
FORMATS = ("csv", "json-like")

# key=value aliases -> argparse destinations
KEY_ALIASES = {
    "delta": "delta", "n-ref": "n_ref", "n_ref": "n_ref", "nref": "n_ref", "n": "n", "m": "m",
    "nbar": "nbar", "n-bar": "nbar", "grid-step": "grid_step", "grid_step": "grid_step", "seed": "seed",
    "out": "out", "format": "format", "state-file": "state_file", "state_file": "state_file",
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"invalid value for '{key}': {message}")
        self.key = key


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass
class RunConfig:
    command: str
    action: str | None = None
    params: dict = field(default_factory=dict)

    def get(self, key, default=None):
        value = self.params.get(key)
        return default if value is None else value

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        p = self.params
        if p.get("delta") is not None and p["delta"] < 1:
            raise ConfigError("delta", "must be >= 1")
        if p.get("n_ref") is not None and p["n_ref"] < self.get("delta", 1):
            raise ConfigError("n-ref", "must be >= delta")
        for key in ("n", "m"):
            if p.get(key) is not None and p[key] < 1:
                raise ConfigError(key, "must be >= 1")
        if p.get("nbar") is not None and not p["nbar"] >= 0:
            raise ConfigError("nbar", "must be >= 0")
        if p.get("grid_step") is not None:
            upper = 0.5 if self.command == "photonic" else np.pi / 2
            if not 0 < p["grid_step"] <= upper:
                raise ConfigError("grid-step", f"must lie in (0, {upper:g}]")
        if p.get("seed") is not None and not 0 <= p["seed"] < 2 ** 64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        if p.get("format") is not None and p["format"] not in FORMATS:
            raise ConfigError("format", f"choose from {', '.join(FORMATS)}")
        if self.command == "photonic":
            if self.action not in (None,) + PHOTONIC_ACTIONS:
                raise ConfigError("action", f"photonic action must be one of {', '.join(PHOTONIC_ACTIONS)}")
        elif self.action is not None:
            raise ConfigError("action", f"command {self.command!r} takes no action word, got {self.action!r}")
        if self.command == "witness" and not p.get("state_file"):
            raise ConfigError("state-file", "witness needs a state file")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ssrbell", description="Bell tests under particle-number superselection.")
    ap.add_argument("words", nargs="*", help="command, optional action, and key=value parameters")
    ap.add_argument("--command", choices=COMMANDS)
    ap.add_argument("--delta", type=int)
    ap.add_argument("--n-ref", dest="n_ref", type=int)
    ap.add_argument("--n", type=int)
    ap.add_argument("--m", type=int)
    ap.add_argument("--nbar", type=float)
    ap.add_argument("--grid-step", dest="grid_step", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("--state-file", dest="state_file")
    return ap


_TYPES = {"delta": int, "n_ref": int, "n": int, "m": int, "nbar": float, "grid_step": float, "seed": int,
          "out": str, "format": str, "state_file": str}


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    params = {k: getattr(ns, k) for k in _TYPES}
    command, action = ns.command, None
    for word in ns.words:
        if "=" in word:
            key, value = word.split("=", 1)
            dest = KEY_ALIASES.get(key.lower())
            if dest is None:
                raise ConfigError(key, "unknown parameter")
            try:
                params[dest] = _TYPES[dest](value)
            except ValueError:
                raise ConfigError(key, f"cannot parse {value!r}") from None
        elif command is None:
            command = word
        elif action is None:
            action = word
        else:
            raise ConfigError(word, "unexpected extra word")
    if command is None:
        raise ConfigError("command", "no command given")
    cfg = RunConfig(command, action, params)
    cfg.validate()
    return cfg


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, default=_jsonable) + "\n"


def _dump_csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    out = cfg.get("out")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _record_output(cfg: RunConfig, record: dict) -> str:
    if cfg.get("format") == "csv":
        keys = sorted(record)
        return _dump_csv(keys, [[json.dumps(record[k], default=_jsonable) if isinstance(record[k], (dict, list))
                                 else record[k] for k in keys]])
    return _dump_json(record)


def _load(cfg: RunConfig):
    return load_state(cfg.get("state_file"))


def cmd_witness(cfg: RunConfig) -> int:
    rho = _load(cfg)
    comp = compare_criteria(rho)
    compliant = is_ssr_compliant(rho)
    if comp.diagonal:
        verdict = "SSR-LOCC"
    elif not compliant:
        verdict = "not SSR-compliant"
    else:
        verdict = "jointly prepared (activates CHSH violation)" if not comp.witness_zero else "jointly prepared"
    record = {
        "max_abs_v": comp.witness.max_abs_v, "delta": comp.witness.delta,
        "v_by_delta": {str(d): v for d, v in comp.witness.values.items()},
        "ssr_compliant": compliant, "diagonal": comp.diagonal, "witness_zero": comp.witness_zero,
        "criteria_agree": comp.agree, "verdict": verdict,
        "s_max": chsh_optimal(max(-1.0, min(1.0, comp.witness.max_abs_v))).s_max,
    }
    _emit(_record_output(cfg, record), cfg)
    return EXIT_OK


def _scan_reference(cfg: RunConfig):
    if cfg.get("state_file"):
        return _load(cfg)
    n_ref = cfg.get("n_ref", 2)
    rng = np.random.default_rng(cfg.get("seed", 0))
    r = rng.standard_normal(n_ref + 1) + 1j * rng.standard_normal(n_ref + 1)
    return PureState.from_terms(FockCutoff(n_ref + 1, n_ref + 1), {(i, n_ref - i): r[i] for i in range(n_ref + 1)})


def cmd_chsh_scan(cfg: RunConfig) -> int:
    """S(beta) at alpha1 = 0, alpha2 = pi/4, beta1 = -beta2 = beta; brute force and closed form."""
    ref = _scan_reference(cfg)
    delta = cfg.get("delta", 1)
    if not is_ssr_compliant(ref):
        raise PreconditionError("chsh-scan needs an SSR-compliant reference")
    v = coherence_v(ref, delta)
    psi = PrincipalState(delta)
    step = cfg.get("grid_step", np.pi / 180)
    betas = np.arange(0.0, np.pi + step / 2, step)
    e = expectation_grid(psi.state, ref, [0.0, np.pi / 4], np.concatenate([betas, -betas]), delta)
    k = betas.size
    brute = e[0, :k] + e[0, k:] + e[1, :k] - e[1, k:]
    closed = -2 * np.cos(2 * betas) + 2 * v * np.sin(2 * betas)
    err = float(np.max(np.abs(brute - closed)))
    if err > 1e-9:
        raise ContractError(f"CHSH scan: brute force and closed form differ by {err!r}")
    if cfg.get("format") == "json-like":
        text = _dump_json({"v": v, "delta": delta, "s_max": chsh_optimal(v).s_max,
                           "rows": [{"beta": b, "s_brute": s1, "s_closed": s2}
                                    for b, s1, s2 in zip(betas, brute, closed)]})
    else:
        text = _dump_csv(["beta", "s_brute", "s_closed"], zip(betas, brute, closed))
    _emit(text, cfg)
    return EXIT_OK


def cmd_minimal_ref(cfg: RunConfig) -> int:
    opt = max_v_separable_minimal()
    w = opt.witness
    record = {"v_max": opt.v_max, "witness": {"p00": w.p00, "p11": w.p11, "p_phi": w.p_phi, "r0": w.r0, "r1": w.r1},
              "witness_separable": is_separable_minimal(w), "s_max": chsh_optimal(opt.v_max).s_max,
              "entangled_v_max": 0.5, "entangled_s_max": chsh_optimal(0.5).s_max}
    _emit(_record_output(cfg, record), cfg)
    return EXIT_OK


def cmd_optimal_ref(cfg: RunConfig) -> int:
    n, m = cfg.get("n", 1), cfg.get("m", cfg.get("n", 1))
    opt = optimal_product_reference(n, m)
    record = {"n": n, "m": m, "f_n": max_shift_expectation(n), "g_m": max_shift_expectation(m), "v": opt.v,
              "s_max": chsh_optimal(opt.v).s_max, "a_coeffs": list(opt.ref.a_coeffs),
              "b_coeffs": list(opt.ref.b_coeffs), "brute_force_s": None}
    if (4 * (n + 1)) * (4 * (m + 1)) <= 4096 and n >= 1 and m >= 1:
        rho = separable_ssr_reference(opt.ref)
        st = chsh_optimal(opt.v).settings
        e = expectation_grid(PrincipalState(1).state, rho, [st.alpha1, st.alpha2], [st.beta1, st.beta2], 1)
        record["brute_force_s"] = float(e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1])
        if abs(record["brute_force_s"] - record["s_max"]) > 1e-9:
            raise ContractError("brute-force CHSH on the twirled product reference disagrees with 2 sqrt(1 + V^2)")
    _emit(_record_output(cfg, record), cfg)
    return EXIT_OK


def cmd_siv_report(cfg: RunConfig) -> int:
    seed = cfg.get("seed", 0)
    minimal = None
    if cfg.get("state_file"):
        state = _load(cfg)  # validates, including the minimal shorthand
        doc = json.loads(Path(cfg.get("state_file")).read_text())
        if doc.get("kind") == "minimal":
            minimal = MinimalReference(*(float(doc[k]) for k in ("p00", "p11", "p_phi", "r0", "r1")))
    else:
        minimal = max_v_separable_minimal().witness
        state = minimal_to_density(minimal)
    record = {"v_abs": abs(coherence_v(state, 1)) if min(state.cutoff.dim_a, state.cutoff.dim_b) > 1 else 0.0}
    if isinstance(state, PureState):
        record["pure_siv"] = pure_siv(state)
        record["pure_siv_bob"] = pure_siv_bob(state)
    if is_ssr_compliant(state):
        record["vf_upper_bound"] = vf_ensemble_upper_bound(state, restarts=64, seed=seed)
    if minimal is not None:
        record["vf_lower_bound"] = vf_bound_minimal(minimal)
        record["sandwich_holds"] = record["vf_lower_bound"] <= record["vf_upper_bound"] + 1e-9
    _emit(_record_output(cfg, record), cfg)
    return EXIT_OK


def cmd_photonic(cfg: RunConfig) -> int:
    action = cfg.action or ("scan" if cfg.get("nbar") is not None else "threshold")
    if action == "threshold":
        th = threshold_nbar()
        record = {"n_bar_threshold": th.n_bar, "p_vac": th.p_vac, "expected": float(np.sqrt(2) - 1)}
        _emit(_record_output(cfg, record), cfg)
        return EXIT_OK
    step = cfg.get("grid_step", 0.01)
    if action == "scan":
        nbar = cfg.get("nbar", 0.2)
        table = optimality_scan(nbar, step)
        best = table.argmax()
        # confirm the analytic optimum at the argmax by direct phase search
        photonic_chsh_max(PhotonicSetup(best[0], best[1], nbar))
        if cfg.get("format") == "json-like":
            text = _dump_json({"n_bar": nbar, "argmax": list(best),
                               "rows": [{"r_a": a, "r_b": b, "s_max": s} for a, b, s in table.rows()]})
        else:
            text = _dump_csv(["r_a", "r_b", "s_max"], table.rows())
        _emit(text, cfg)
        return EXIT_OK
    nbars = np.round(np.arange(step, 2.0 + step / 2, step), 12)
    rows = [(n, PhotonicSetup.hessmo(n).r_a, photonic_chsh_max(PhotonicSetup.hessmo(n), cross_check=False).s_max)
            for n in nbars]
    _emit(_dump_csv(["n_bar", "r", "s_max"], rows), cfg)
    return EXIT_OK


def determinism_record(first: list, seed: int) -> claims.ClaimRecord:
    """Re-run the seeded, quick claims in-process and compare serialized records."""
    again = [claims.claim_chsh_closed_form(seed), claims.claim_twirl_invariance(seed)]
    before = [r for r in first if r.claim_id in {a.claim_id for a in again}]
    same = _dump_json([r.as_dict() for r in before]) == _dump_json([r.as_dict() for r in again])
    return claims.ClaimRecord("C10-determinism", "seeded claims re-run in-process serialize byte-identically",
                              "identical", float(same), 0.0, same, {"rechecked": [r.claim_id for r in again]})


def cmd_reproduce_all(cfg: RunConfig) -> int:
    seed = cfg.get("seed", 0)
    records = claims.run_all(seed)
    records.append(determinism_record(records, seed))
    docs = [r.as_dict() for r in records]
    if cfg.get("format") == "csv":
        text = _dump_csv(["claim-id", "expected", "computed", "tolerance", "pass"],
                         [[d["claim-id"], d["expected"], d["computed"], d["tolerance"], d["pass"]] for d in docs])
    else:
        text = _dump_json({"seed": seed, "records": docs})
    _emit(text, cfg)
    for r in records:
        print(r.line(), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in records) else EXIT_CONTRACT


HANDLERS = {
    "witness": cmd_witness, "chsh-scan": cmd_chsh_scan, "minimal-ref": cmd_minimal_ref,
    "optimal-ref": cmd_optimal_ref, "siv-report": cmd_siv_report, "photonic": cmd_photonic,
    "reproduce-all": cmd_reproduce_all,
}


def run(cfg: RunConfig) -> int:
    try:
        return HANDLERS[cfg.command](cfg)
    except ContractError as exc:
        print(f"ssrbell: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (OSError, StateFileError, StateValidationError, json.JSONDecodeError) as exc:
        print(f"ssrbell: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PreconditionError, SizeError) as exc:
        print(f"ssrbell: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"ssrbell: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
