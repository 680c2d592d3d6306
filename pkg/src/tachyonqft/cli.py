"""Command-line front end.

Every command computes a table of rows plus a list of named checks.  The
process exits 0 when all checks pass, 1 when a check fails or a numeric
evaluation does not converge, and 2 on a usage error.  Output is a
deterministic function of the configuration and the toolkit version.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from . import fields as F
from . import fock
from . import loopint as L
from . import lorentz as LZ
from . import wavepacket as W

REPORT_SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    command: str
    config: dict
    columns: list[str] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


# ---------------------------------------------------------------------------
# parameter parsing

def _floats(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _points(text) -> tuple[tuple[float, float], ...]:
    if isinstance(text, (list, tuple)):
        return tuple((float(a), float(b)) for a, b in text)
    out = []
    for chunk in str(text).split(";"):
        if chunk.strip():
            dt, r = chunk.split(":")
            out.append((float(dt), float(r)))
    return tuple(out)


def _grid(text) -> tuple[float, float, int]:
    try:
        a, b, n = str(text).split(":")
        lo, hi, count = float(a), float(b), int(n)
    except ValueError as exc:
        raise UsageError(f"grid must look like start:stop:count, got {text!r}") from exc
    if count < 0:
        raise UsageError("grid count must be non-negative")
    return lo, hi, count


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# command -> {param: (converter, default, help)}
PARAMS: dict[str, dict[str, tuple[Callable, object, str]]] = {
    "commutators": {
        "variant": (str, "phi1", "phi1, phi2 or subluminal"),
        "m": (float, 1.0, "mass parameter"),
        "points": (_points, "0.5:2;1.3:2.7;0:5;-0.5:2;3:1", "dt:r pairs separated by ';'"),
        "sigma": (float, 0.5, "width of the smearing Gaussians"),
        "d": (float, 0.3, "distance between the smearing centres"),
    },
    "boost-check": {
        "k": (_floats, "0.75,1.25,0,0", "four-momentum witness"),
        "u": (_floats, "0.8,0,0", "boost velocity for the witness"),
        "samples": (int, 10000, "random on-shell momenta and boosts"),
        "seed": (int, 12345, "RNG seed for the sweep"),
    },
    "pole-scan": {
        "p": (float, 1.0, "CM momentum"),
        "mphi": (float, 1.0, "tachyon mass parameter"),
        "mpsi": (float, 1.0, "external mass"),
    },
    "figure2": {
        "m0sq": (float, -1.0, "internal phi mass squared"),
        "m1sq": (float, 1.0, "internal psi mass squared"),
        "grid": (_grid, "-10:10:200", "p2 grid start:stop:count (inclusive)"),
    },
    "wavepacket": {
        "tachyonic": (_bool, True, "tachyon packet or ordinary reference"),
        "m": (float, 1.0, "mass parameter"),
        "k0": (_floats, "1.25,0,0", "bump centre"),
        "w": (float, 0.2, "bump width"),
        "t_min": (float, 500.0, "first time of the fit"),
        "t_max": (float, 5000.0, "last time of the fit"),
        "n": (int, 6, "number of log-spaced times"),
    },
    "norms": {
        "betas": (_floats, "0.75,1.5,2.5", "power-tail exponents"),
        "m": (float, 1.0, "mass parameter"),
        "doublings": (int, 40, "radius doublings"),
    },
}
COMMANDS = tuple(PARAMS) + ("all",)
ALL_RUNS = (
    ("commutators_phi1", "commutators", {"variant": "phi1"}),
    ("commutators_phi2", "commutators", {"variant": "phi2"}),
    ("commutators_subluminal", "commutators", {"variant": "subluminal"}),
    ("boost-check", "boost-check", {}),
    ("pole-scan", "pole-scan", {}),
    ("figure2_tachyon", "figure2", {"m0sq": -1.0}),
    ("figure2_ordinary", "figure2", {"m0sq": 1.0}),
    ("wavepacket_tachyon", "wavepacket", {}),
    ("wavepacket_subluminal", "wavepacket", {"tachyonic": False, "k0": "0.75,0,0", "w": 0.3}),
    ("norms", "norms", {}),
)


def resolve_params(command: str, supplied: dict) -> dict:
    spec = PARAMS[command]
    unknown = sorted(set(supplied) - set(spec))
    if unknown:
        raise UsageError(f"unknown parameter(s) for {command}: {', '.join(unknown)}")
    out = {}
    for key, (conv, default, _) in spec.items():
        raw = supplied.get(key, default)
        try:
            out[key] = conv(raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {key}: {raw!r} ({exc})") from exc
    return out


def _echo(params: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}


# ---------------------------------------------------------------------------
# commands

def _symbolic_twin_checks(rep: Report, convention: str) -> None:
    labels = [fock.label(n) for n in ("k", "l")]
    labels += [-labels[0], labels[0].boosted()]
    zero = True
    for k in labels:
        for l in labels:
            ck, cl = fock.twin_c(k), fock.twin_c(l)
            zero &= fock.commutator(ck, cl.adjoint()).is_zero()
            zero &= fock.commutator(ck, cl).is_zero()
    rep.check(f"twin ladder commutators vanish ({convention})", zero)
    k = labels[0]
    field_comm = fock.commutator(fock.twin_field(k, "x", convention), fock.twin_field(k, "y", convention))
    rep.summary[f"twin_field_mode_commutator_{convention}"] = field_comm.pretty()


def run_commutators(p: dict) -> Report:
    variant, m = p["variant"], p["m"]
    if variant not in F.VARIANTS:
        raise UsageError(f"variant must be one of {F.VARIANTS}")
    support = "all" if variant == "subluminal" else "above"
    kernel = F.CommutatorKernel(m, variant, support)
    rep = Report("commutators", _echo(p))
    rep.columns = ["dt", "r", "re", "im", "error", "path_a_im", "path_b_im", "method_agreement"]
    for dt, r in p["points"]:
        res = F.commutator(F.SpacetimeSeparation(dt, r), kernel)
        if not res.converged:
            raise F.NonConvergenceError("commutator extrapolation did not converge",
                                        {"dt": dt, "r": r, "error": res.error})
        if variant == "subluminal":
            a, b = res.value.imag, F.pauli_jordan_closed(dt, r, m).imag
            agree = abs(a - b) < 1e-6
        elif "direct" in res.diagnostics:
            a, b = res.diagnostics["direct"].imag, res.diagnostics["dual"].imag
            agree = res.error < 1e-6
        else:
            a = b = 0.0
            agree = True
        rep.rows.append({"dt": dt, "r": r, "re": res.value.real, "im": res.value.imag,
                         "error": res.error, "path_a_im": a, "path_b_im": b, "method_agreement": agree})
    rep.check("two evaluation paths agree", all(r["method_agreement"] for r in rep.rows))
    ccr = F.smeared_ccr(kernel, p["sigma"], p["d"])
    rep.summary.update(smeared_ccr_im=ccr.value.imag, delta_overlap=ccr.overlap)
    if variant == "phi1":
        _symbolic_twin_checks(rep, fock.STAR_TRANSPOSE)
        rep.check("field commutator vanishes", all(abs(complex(r["re"], r["im"])) < 1e-10 for r in rep.rows))
        rep.check("smeared field CCR fails: 0 != i delta", abs(ccr.value) < 1e-8 < ccr.overlap,
                  f"smeared={ccr.value.imag:.3e} overlap={ccr.overlap:.6f}")
    elif variant == "phi2":
        _symbolic_twin_checks(rep, fock.STAR_ADJOINT)
        rep.check("commutator vanishes at equal times",
                  all(abs(r["im"]) < 1e-8 for r in rep.rows if r["dt"] == 0))
        rep.check("commutator nonzero at unequal times, spacelike",
                  any(abs(r["im"]) > 1e-6 for r in rep.rows if 0 < abs(r["dt"]) < r["r"]))
        probe = F.boost_invariance_probe(F.SpacetimeSeparation(0.0, 2.0), 0.5, kernel)
        rep.summary["boost_probe_boosted_im"] = probe.value_boosted.imag
        rep.check("boosted equal-time value differs (not invariant)", probe.significant)
    else:
        rep.check("microcausality at spacelike points",
                  all(abs(r["im"]) < 1e-6 for r in rep.rows if r["r"] > abs(r["dt"])))
        rep.check("smeared CCR reproduces the delta overlap", abs(ccr.value - 1j * ccr.overlap) < 1e-6)
    return rep


def run_boost_check(p: dict) -> Report:
    rep = Report("boost-check", _echo(p))
    rep.columns = ["quantity", "value"]
    if len(p["k"]) != 4 or len(p["u"]) != 3:
        raise UsageError("k needs 4 components and u needs 3")
    k = LZ.FourVector(p["k"][0], p["k"][1:])
    b = LZ.Boost(p["u"])
    kp = LZ.boost_apply(b, k)
    rep.rows.append({"quantity": "witness_boosted_e0", "value": kp.e0})
    rep.check("boosted energy of the witness is negative", kp.e0 < 0, f"e0'={kp.e0:.10f}")
    inv = LZ.verify_onshell_invariance(k, b)
    rep.rows.append({"quantity": "witness_boosted_pnorm", "value": inv.k_prime_norm})
    rep.check("witness stays in |k| >= m", inv.passed)

    rng = np.random.default_rng(p["seed"])
    worst_margin, worst_metric = math.inf, 0.0
    for _ in range(p["samples"]):
        m = rng.uniform(0.1, 3.0)
        kvec = rng.normal(size=3)
        kvec *= rng.uniform(1.0 + 1e-6, 10.0) * m / np.linalg.norm(kvec)
        kk = LZ.onshell_tachyon(kvec, m)
        if rng.random() < 0.5:
            kk = LZ.FourVector(-kk.e0, kk.evec)
        u = rng.normal(size=3)
        u *= rng.uniform(0.0, 0.999) / np.linalg.norm(u)
        bb = LZ.Boost(u)
        rep_i = LZ.verify_onshell_invariance(kk, bb, tol=1e-9)
        worst_margin = min(worst_margin, rep_i.margin / m)
        worst_metric = max(worst_metric, abs(LZ.boost_apply(bb, kk).square - kk.square))
    rep.rows.append({"quantity": "sweep_min_relative_margin", "value": worst_margin})
    rep.rows.append({"quantity": "sweep_max_metric_violation", "value": worst_metric})
    rep.check("on-shell support is boost invariant (sweep)", worst_margin >= -1e-9)
    rep.check("boosts preserve the metric (sweep)", worst_metric < 1e-10)

    off = LZ.offshell_counterexample((1.25, 0, 0), (1, 0, 0), 0.8)
    rep.rows.append({"quantity": "offshell_boosted_pnorm", "value": off.pnorm})
    rep.check("off-shell momentum boosts to |k'| = 0", off.pnorm < 1e-12)

    flip = LZ.find_sign_flipping_boost(k)
    rep.rows.append({"quantity": "sign_flip_speed", "value": flip.speed})
    rep.check("sign-flipping boost exists for spacelike k", LZ.boost_apply(flip, k).e0 < 0)

    pl, ql = fock.label("p"), fock.label("q")
    raw = fock.commutator(fock.a(pl), fock.adag(ql), normalize=False)
    flipped = fock.boost_map(raw, sign_flip=True).normal_ordered()
    kept = fock.boost_map(raw, sign_flip=False).normal_ordered()
    lp, lq = pl.boosted(), ql.boosted()
    rep.summary["boosted_ccr_flip"] = flipped.pretty()
    rep.check("sign-flipping boost negates the CCR weight", flipped == fock.DeltaWeight(lp, lq, -1))
    rep.check("ordinary boost keeps the CCR weight", kept == fock.DeltaWeight(lp, lq, +1))
    kl, ll = fock.label("k"), fock.label("l")
    ck = fock.boost_map(fock.twin_c(kl), True)
    cl = fock.boost_map(fock.twin_c(ll).adjoint(), True)
    rep.check("twin commutators stay zero under the flip", fock.commutator(ck, cl).is_zero())
    return rep


def run_pole_scan(p: dict) -> Report:
    kin = LZ.ElasticKinematics(p["p"], p["mpsi"], p["mphi"])
    poles = LZ.pole_scan(kin)
    rep = Report("pole-scan", _echo(p))
    rep.columns = ["channel", "cos_theta", "invariant"]
    for pole in poles:
        inv = kin.t(pole.cos_theta) if pole.channel == "t" else kin.u(pole.cos_theta)
        rep.rows.append({"channel": pole.channel, "cos_theta": pole.cos_theta, "invariant": inv})
    below = 4 * p["p"] ** 2 < p["mphi"] ** 2
    rep.check("no poles iff 4p^2 < m_phi^2", (not poles) == below)
    rep.check("each pole sits at -m_phi^2",
              all(abs(r["invariant"] + p["mphi"] ** 2) < 1e-12 for r in rep.rows))
    if 4 * p["p"] ** 2 > p["mphi"] ** 2:
        rep.check("poles lie inside the physical region", all(abs(r["cos_theta"]) < 1 for r in rep.rows))
    return rep


def run_figure2(p: dict) -> Report:
    lo, hi, n = p["grid"]
    grid = np.linspace(lo, hi, n)
    rows = L.figure2_dataset(p["m0sq"], p["m1sq"], grid)
    rep = Report("figure2", {**_echo(p), "grid": f"{lo!r}:{hi!r}:{n}"})
    rep.columns = list(L.FIGURE2_COLUMNS)
    rep.rows = rows
    rep.check("closed form and quadrature agree", all(r["method_agreement"] for r in rows))
    measure_ok = all(
        abs(r["imI"] - L.im_measure(L.SelfEnergyParams(r["p2"], p["m0sq"], p["m1sq"]))) < 1e-9
        for r in rows if r["p2"] != 0
        and abs(r["p2"] - (L.threshold_analysis(p["m0sq"], p["m1sq"]).upper or math.nan)) > 1e-6
    )
    rep.check("Im I equals the measure of {Delta < 0}", measure_ok)
    region = L.threshold_analysis(p["m0sq"], p["m1sq"])
    if region.empty:
        rep.check("Im I < 0 at every finite p2", all(r["imI"] < -1e-6 for r in rows))
    else:
        rep.check("Im I = 0 below threshold", all(abs(r["imI"]) < 1e-12 for r in rows if r["p2"] in region))
        rep.summary["threshold"] = region.upper
    return rep


def run_wavepacket(p: dict) -> Report:
    spec = W.WavePacketSpec(m=p["m"], family="bump", k0=p["k0"], w=p["w"], tachyonic=p["tachyonic"])
    k0 = spec.k0_norm
    v_s = k0 / float(spec.omega(k0))
    ts = np.geomspace(p["t_min"], p["t_max"], p["n"])
    fit = W.decay_exponent_fit(spec, v_s, ts)
    rep = Report("wavepacket", _echo(p))
    rep.columns = ["t", "re", "im", "abs", "estimate_abs", "ratio"]
    for t, val in zip(fit.t_values, fit.values):
        est = W.stationary_phase_estimate(t, W.trajectory_point(spec, v_s, t), spec)
        rep.rows.append({"t": t, "re": val.real, "im": val.imag, "abs": abs(val),
                         "estimate_abs": abs(est.value), "ratio": abs(val) / abs(est.value)})
    rep.summary.update(slope=fit.slope, stderr=fit.stderr, v_s=v_s,
                       onset_time=W.onset_time(spec), preasymptotic=fit.preasymptotic)
    rep.check("decay exponent is -3/2 within 0.05", abs(fit.slope + 1.5) <= 0.05, f"slope={fit.slope:.4f}")
    rep.check("fit window is past the onset time", not fit.preasymptotic)
    return rep


def run_norms(p: dict) -> Report:
    rep = Report("norms", _echo(p))
    rep.columns = ["beta", "R", "partial_l2", "partial_l1"]
    m = p["m"]
    for beta in p["betas"]:
        spec = W.WavePacketSpec(m=m, family="power_tail", beta=beta)
        res = W.norm_analysis(spec, doublings=p["doublings"])
        for R, a, b in res.partial_integral_trace:
            rep.rows.append({"beta": beta, "R": R, "partial_l2": a, "partial_l1": b})
        expect = ("finite" if beta > 1 else "divergent", "finite" if beta > 2 else "divergent")
        got = (res.l2_weighted, res.l1_weighted)
        rep.summary[f"beta={beta!r}"] = {"l2_weighted": got[0], "l1_weighted": got[1],
                                         "l2_growth": res.l2_growth, "l1_growth": res.l1_growth}
        if abs(beta - 1) > 0.1 and abs(beta - 2) > 0.1:
            rep.check(f"beta={beta!r} classified as {expect}", got == expect)
    trace = W.threshold_trace(m, 2.0 * m)
    rep.summary["threshold_limit"] = trace[-1][1]
    rep.check("1/omega is integrable at the threshold", abs(trace[-2][1] - trace[-1][1]) < 1e-3 * trace[-1][1])
    return rep


RUNNERS = {
    "commutators": run_commutators,
    "boost-check": run_boost_check,
    "pole-scan": run_pole_scan,
    "figure2": run_figure2,
    "wavepacket": run_wavepacket,
    "norms": run_norms,
}


def execute(command: str, params: dict) -> Report:
    """Run one command; non-convergence becomes a failed check with its diagnostics."""
    try:
        return RUNNERS[command](params)
    except (F.NonConvergenceError, L.NonConvergenceError, W.NonConvergenceError) as exc:
        rep = Report(command, _echo(params))
        diag = getattr(exc, "diagnostics", {})
        rep.summary["diagnostics"] = {str(k): _jsonable(v) for k, v in sorted(diag.items())}
        rep.check("numeric evaluation converged", False, str(exc))
        return rep


# ---------------------------------------------------------------------------
# output

def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _header(rep: Report) -> dict:
    return {"toolkit": "tachyonqft", "version": __version__, "schema": REPORT_SCHEMA,
            "command": rep.command, "config": _jsonable(rep.config)}


def report_dict(rep: Report) -> dict:
    return {
        **_header(rep),
        "status": "pass" if rep.passed else "fail",
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in rep.checks],
        "summary": _jsonable(rep.summary),
        "columns": rep.columns,
        "rows": [_jsonable(r) for r in rep.rows],
    }


def render(rep: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report_dict(rep), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# {json.dumps(_header(rep), sort_keys=True)}\n")
    for c in rep.checks:
        buf.write(f"# check {'PASS' if c.passed else 'FAIL'}: {c.name}" + (f" ({c.detail})" if c.detail else "") + "\n")
    if rep.summary:
        buf.write(f"# summary {json.dumps(_jsonable(rep.summary), sort_keys=True)}\n")
    writer = csv.DictWriter(buf, fieldnames=rep.columns, lineterminator="\n")
    writer.writeheader()
    for row in rep.rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# entry point

def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tachyonqft", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tachyonqft {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        sp.add_argument("--output", help="file to write (a directory for 'all'); stdout if omitted")
        sp.add_argument("--config", help="JSON file with parameters for this command")
        for key, (_, default, help_) in PARAMS.get(name, {}).items():
            sp.add_argument(_flag(key), dest=key, default=None, help=f"{help_} (default {default})")
    return parser


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def _join_values(argv: list[str]) -> list[str]:
    """Attach values such as ``-10:10:200`` to their flag so argparse keeps them."""
    flags = {_flag(k) for spec in PARAMS.values() for k in spec}
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in flags and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] not in flags:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(_join_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        supplied = _load_config(args.config)
        supplied.update({k: getattr(args, k) for k in PARAMS.get(args.command, {})
                         if getattr(args, k) is not None})
        if args.command == "all":
            if supplied:
                raise UsageError("'all' runs fixed configurations and takes no parameters")
            reports = [(tag, execute(cmd, resolve_params(cmd, extra))) for tag, cmd, extra in ALL_RUNS]
        else:
            reports = [(args.command, execute(args.command, resolve_params(args.command, supplied)))]
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # domain rejections of the supplied parameters
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    ext = args.format
    if args.command == "all" and args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        for tag, rep in reports:
            (out / f"{tag}.{ext}").write_text(render(rep, ext))
    else:
        text = "".join(render(rep, ext) for _, rep in reports)
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
    for tag, rep in reports:
        for c in rep.checks:
            if not c.passed:
                print(f"FAIL [{tag}] {c.name} {c.detail}".rstrip(), file=sys.stderr)
    return EXIT_OK if all(rep.passed for _, rep in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
