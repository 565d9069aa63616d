"""Command-line front end.

Five subcommands behind one TOML configuration format: simulate, couple,
check-ergodicity, gibbs-validate, diagnose.  Every command first echoes its
fully resolved configuration (all defaults made explicit) so that re-running
with the echoed document reproduces the outputs byte for byte.

Exit codes: 0 success, 2 configuration error, 3 runtime model error,
4 a check failed, 5 inconclusive verdict.
"""
import argparse
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

import numpy as np

from .bd_chain import (
    ConstantRatesChain,
    ExplicitChain,
    HarmonicBirthChain,
    MMInfinityChain,
    ergodicity_check,
    rate_condition_check,
)
from .config_space import Configuration, Domain
from .diagnostics import (
    CountExponential,
    CountIndicator,
    PAIRDIST_KS_GATE,
    COUNT_TV_GATE,
    SmoothCylinder,
    compare_point_samples,
    coupling_check,
    generator_check,
    gibbs_invariance_check,
    mcmc_gibbs_oracle,
    report_to_jsonl,
)
from .engine import (
    ModelSpec,
    poisson_domination_report,
    simulate,
    trajectory_to_jsonl,
)
from .errors import BdmoveError, ConfigError
from .jump_kernels import (
    ConstantBirthRate,
    ConstantField,
    ExpDecayField,
    GibbsBirth,
    GibbsBirthIntensity,
    IntensitySpec,
    LinearDeath,
    LinearField,
    MixtureBirth,
    QuadratureSpec,
    UniformBirth,
    UniformDeath,
    UnitDeath,
    WeightedDeath,
    bounded_intensities,
)
from .movers import Constant, LangevinGradient, ReflectedBrownian
from .potentials import (
    GibbsPotential,
    LennardJonesRepulsive,
    Riesz,
    SoftCore,
    StraussRegularised,
    Zero,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_FAIL = 4
EXIT_INCONCLUSIVE = 5

_PASS_VERDICTS = ("Eq30", "Eq31", "Eq32", "Eq33", "Corollary")

_REQUIRED = object()


# ---------------------------------------------------------------------------
# schema plumbing

def _want_float(name, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number")
    return float(v)


def _want_int(name, v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{name} must be an integer")
    return int(v)


def _want_str(name, v):
    if not isinstance(v, str):
        raise ConfigError(f"{name} must be a string")
    return v


def _want_bool(name, v):
    if not isinstance(v, bool):
        raise ConfigError(f"{name} must be a boolean")
    return v


def _want_list(name, v):
    if not isinstance(v, list):
        raise ConfigError(f"{name} must be an array")
    return v


_COERCE = {"float": _want_float, "int": _want_int, "str": _want_str,
           "bool": _want_bool, "list": _want_list}


def _resolve_keys(section, raw, schema):
    """Validate one section against (key, type, default) triples.

    Returns a dict in schema order with every default made explicit; any
    key outside the schema is rejected.
    """
    known = {k for k, _, _ in schema}
    for k in raw:
        if k not in known:
            raise ConfigError(f"unknown key '{k}' in [{section}]")
    out = {}
    for key, kind, default in schema:
        if key in raw:
            out[key] = _COERCE[kind](f"[{section}].{key}", raw[key])
        elif default is _REQUIRED:
            raise ConfigError(f"[{section}] is missing required key '{key}'")
        else:
            out[key] = default
    return out


def _kind_of(section, raw, key, choices):
    val = raw.get(key)
    if val is None:
        raise ConfigError(f"[{section}] is missing required key '{key}'")
    val = _want_str(f"[{section}].{key}", val)
    if val not in choices:
        raise ConfigError(
            f"[{section}].{key} must be one of {sorted(choices)}, got '{val}'")
    return val


# ---------------------------------------------------------------------------
# section resolvers: raw TOML -> (resolved dict, built object)

def _resolve_domain(raw):
    res = _resolve_keys("domain", raw, [
        ("dim", "int", _REQUIRED),
        ("bounds", "list", []),
    ])
    bounds = res["bounds"]
    if bounds:
        try:
            dom = Domain(res["dim"], tuple(tuple(b) for b in bounds))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"[domain].bounds: {e}") from None
        res["bounds"] = [[float(lo), float(hi)] for lo, hi in dom.bounds]
    else:
        dom = Domain(res["dim"], None)
    return res, dom


_PAIR_SPECS = {
    "zero": [],
    "lennard_jones": [("c", "float", 1.0)],
    "riesz": [("c", "float", 1.0), ("alpha", "float", _REQUIRED)],
    "soft_core": [("c", "float", 1.0)],
    "strauss": [("gamma", "float", _REQUIRED), ("range_r", "float", _REQUIRED),
                ("eps", "float", _REQUIRED)],
}


def _resolve_potential(raw, dim):
    base = [("activity", "float", 0.0), ("pair", "str", "zero")]
    pair = raw.get("pair", "zero")
    pair = _kind_of("potential", {"pair": pair}, "pair", set(_PAIR_SPECS))
    res = _resolve_keys("potential", raw, base + _PAIR_SPECS[pair])
    try:
        if pair == "zero":
            p = Zero()
        elif pair == "lennard_jones":
            p = LennardJonesRepulsive(res["c"])
        elif pair == "riesz":
            p = Riesz(res["c"], res["alpha"], dim)
        elif pair == "soft_core":
            p = SoftCore(res["c"])
        else:
            p = StraussRegularised(res["gamma"], res["range_r"], res["eps"])
        g = GibbsPotential(res["activity"], p)
    except ValueError as e:
        raise ConfigError(f"[potential]: {e}") from None
    return res, g


def _resolve_intensities(raw, domain, g):
    birth_kind = _kind_of("intensities", raw, "birth", {"constant", "gibbs"})
    death_kind = _kind_of("intensities", raw, "death", {"unit", "linear"})
    schema = [("birth", "str", _REQUIRED), ("death", "str", _REQUIRED),
              ("alpha_star", "float", 0.0)]
    if birth_kind == "constant":
        schema += [("b0", "float", _REQUIRED), ("cutoff", "int", 0)]
    else:
        schema += [("quad_cells", "int", 128)]
    if death_kind == "linear":
        schema += [("d0", "float", _REQUIRED), ("n_cap", "int", 10_000)]
    res = _resolve_keys("intensities", raw, schema)
    try:
        if birth_kind == "constant":
            birth = ConstantBirthRate(res["b0"],
                                      res["cutoff"] if res["cutoff"] > 0 else None)
        else:
            birth = GibbsBirthIntensity(g, QuadratureSpec(res["quad_cells"]))
        death = UnitDeath() if death_kind == "unit" else \
            LinearDeath(res["d0"], res["n_cap"])
        if res["alpha_star"] > 0.0:
            intens = IntensitySpec(birth, death, res["alpha_star"])
        else:
            intens = bounded_intensities(birth, death, domain)
            res["alpha_star"] = intens.alpha_star
    except (ValueError, BdmoveError) as e:
        raise ConfigError(f"[intensities]: {e}") from None
    return res, intens


_FIELD_SPECS = {
    "constant": [("c", "float", 1.0)],
    "linear": [("c", "float", 1.0)],
    "exp_decay": [("c", "float", 1.0), ("ell", "float", 1.0)],
}


def _resolve_field(name, raw):
    if not isinstance(raw, dict):
        raise ConfigError(f"{name} must be an inline table")
    kind = _kind_of(name, raw, "kind", set(_FIELD_SPECS))
    res = _resolve_keys(name, raw, [("kind", "str", _REQUIRED)] + _FIELD_SPECS[kind])
    cls = {"constant": ConstantField, "linear": LinearField,
           "exp_decay": ExpDecayField}[kind]
    args = {k: v for k, v in res.items() if k != "kind"}
    return res, cls(**args)


def _resolve_birth_kernel(raw, g):
    kind = _kind_of("birth", raw, "kind", {"uniform", "gibbs", "mixture"})
    if kind == "mixture":
        raw = dict(raw)
        # the dispersion fields arrive as inline tables, resolved separately
        phi1_raw = raw.pop("phi1", {"kind": "constant", "c": 0.0})
        phi2_raw = raw.pop("phi2", {"kind": "constant", "c": 0.0})
        res = _resolve_keys("birth", raw, [("kind", "str", _REQUIRED),
                                           ("base_scale", "float", 0.25)])
        r1, f1 = _resolve_field("[birth].phi1", phi1_raw)
        r2, f2 = _resolve_field("[birth].phi2", phi2_raw)
        res["phi1"], res["phi2"] = r1, r2
        try:
            return res, MixtureBirth(res["base_scale"], f1, f2)
        except ValueError as e:
            raise ConfigError(f"[birth]: {e}") from None
    res = _resolve_keys("birth", raw, [("kind", "str", _REQUIRED)])
    return res, UniformBirth() if kind == "uniform" else GibbsBirth(g)


def _resolve_death_kernel(raw):
    kind = _kind_of("death", raw, "kind", {"uniform", "weighted"})
    if kind == "uniform":
        res = _resolve_keys("death", raw, [("kind", "str", _REQUIRED)])
        return res, UniformDeath()
    raw = dict(raw)
    field_raw = raw.pop("field", {"kind": "constant", "c": 1.0})
    res = _resolve_keys("death", raw, [("kind", "str", _REQUIRED)])
    rf, field = _resolve_field("[death].field", field_raw)
    res["field"] = rf
    return res, WeightedDeath(field)


def _resolve_mover(raw, g):
    kind = _kind_of("mover", raw, "kind",
                    {"constant", "reflected_brownian", "langevin"})
    schema = [("kind", "str", _REQUIRED)]
    if kind == "reflected_brownian":
        schema += [("inv_temp", "float", 1.0)]
    elif kind == "langevin":
        schema += [("inv_temp", "float", 1.0), ("step", "float", 1e-3),
                   ("taming", "float", 1.0)]
    res = _resolve_keys("mover", raw, schema)
    try:
        if kind == "constant":
            return res, Constant()
        if kind == "reflected_brownian":
            return res, ReflectedBrownian(res["inv_temp"])
        return res, LangevinGradient(g.pair, res["inv_temp"], res["step"],
                                     res["taming"])
    except ValueError as e:
        raise ConfigError(f"[mover]: {e}") from None


_CHAIN_SCHEMAS = {
    "mm_infinity": [("lam", "float", _REQUIRED), ("mu", "float", _REQUIRED)],
    "constant_rates": [("b", "float", _REQUIRED), ("d", "float", _REQUIRED),
                       ("cutoff", "int", 0)],
    "harmonic": [("c", "float", _REQUIRED)],
    "explicit": [("beta_seq", "list", _REQUIRED), ("delta_seq", "list", _REQUIRED),
                 ("tail", "str", "none")],
}


def _resolve_chain(raw):
    family = _kind_of("chain", raw, "family", set(_CHAIN_SCHEMAS))
    schema = [("family", "str", _REQUIRED)] + _CHAIN_SCHEMAS[family] + \
        [("gamma", "list", [])]
    res = _resolve_keys("chain", raw, schema)
    try:
        if family == "mm_infinity":
            chain = MMInfinityChain(res["lam"], res["mu"])
        elif family == "constant_rates":
            chain = ConstantRatesChain(res["b"], res["d"],
                                       res["cutoff"] if res["cutoff"] > 0 else None)
        elif family == "harmonic":
            chain = HarmonicBirthChain(res["c"])
        else:
            tail = None if res["tail"] == "none" else res["tail"]
            chain = ExplicitChain(res["beta_seq"], res["delta_seq"], tail)
    except (ValueError, BdmoveError) as e:
        raise ConfigError(f"[chain]: {e}") from None
    gamma = [float(v) for v in res["gamma"]]
    res["gamma"] = gamma
    return res, chain, (np.asarray(gamma) if gamma else None)


_RUN_SPECS = {
    "simulate": [("horizon", "float", _REQUIRED), ("checkpoints", "list", []),
                 ("points_cap", "int", 512), ("initial", "list", [])],
    "couple": [("t_list", "list", _REQUIRED), ("n0", "int", _REQUIRED),
               ("trials", "int", 1000), ("initial", "list", [])],
    "check-ergodicity": [],
    "gibbs-validate": [("burn_in", "float", 30.0),
                       ("n_samples", "int", 2000),
                       ("spacing", "float", 2.0),
                       ("oracle_sweeps", "int", 0),
                       ("calibration", "bool", False)],
    "diagnose": [("h", "float", 0.01), ("trials", "int", 2000),
                 ("functions", "list", _REQUIRED), ("initial", "list", []),
                 ("domination_t", "float", 1.0),
                 ("domination_trials", "int", 2000)],
}

_FUNC_SPECS = {
    "count_indicator": [("k", "int", _REQUIRED)],
    "count_exponential": [("theta", "float", _REQUIRED)],
    "smooth_cylinder": [("theta", "float", _REQUIRED)],
}


def _resolve_functions(items):
    out_res, out_fn = [], []
    for i, item in enumerate(items):
        name = f"[run].functions[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{name} must be an inline table")
        kind = _kind_of(name, item, "kind", set(_FUNC_SPECS))
        res = _resolve_keys(name, item,
                            [("kind", "str", _REQUIRED)] + _FUNC_SPECS[kind])
        try:
            if kind == "count_indicator":
                fn = CountIndicator(res["k"])
            elif kind == "count_exponential":
                fn = CountExponential(res["theta"])
            else:
                fn = SmoothCylinder(res["theta"])
        except ValueError as e:
            raise ConfigError(f"{name}: {e}") from None
        out_res.append(res)
        out_fn.append(fn)
    return out_res, out_fn


# ---------------------------------------------------------------------------
# whole-config resolution

_MODEL_COMMANDS = ("simulate", "couple", "gibbs-validate", "diagnose")


def resolve_config(raw, command):
    """Validate and default-fill the document; build the model objects.

    Returns (resolved dict ready for echoing, context dict of built objects).
    """
    if not isinstance(raw, dict):
        raise ConfigError("the configuration root must be a table")
    known_top = {"schema_version", "seed", "domain", "potential", "intensities",
                 "birth", "death", "mover", "chain", "run"}
    for k in raw:
        if k not in known_top:
            raise ConfigError(f"unknown top-level key '{k}'")
    version = raw.get("schema_version", 1)
    if version != 1:
        raise ConfigError(f"unsupported schema_version {version}")
    seed = _want_int("seed", raw.get("seed", 0))
    if seed < 0:
        raise ConfigError("seed must be nonnegative")

    resolved = {"schema_version": 1, "seed": seed}
    ctx = {"seed": seed, "command": command}

    needs_model = command in _MODEL_COMMANDS
    if needs_model or "domain" in raw:
        if "domain" not in raw:
            raise ConfigError("missing required section [domain]")
        resolved["domain"], ctx["domain"] = _resolve_domain(raw["domain"])
    if needs_model or "potential" in raw:
        resolved["potential"], ctx["g"] = _resolve_potential(
            raw.get("potential", {}), ctx["domain"].dim)
    if needs_model or "intensities" in raw:
        if "intensities" not in raw:
            raise ConfigError("missing required section [intensities]")
        resolved["intensities"], ctx["intensities"] = _resolve_intensities(
            raw["intensities"], ctx["domain"], ctx["g"])
    if needs_model or "birth" in raw:
        if "birth" not in raw:
            raise ConfigError("missing required section [birth]")
        resolved["birth"], ctx["birth"] = _resolve_birth_kernel(raw["birth"], ctx["g"])
    if needs_model or "death" in raw:
        if "death" not in raw:
            raise ConfigError("missing required section [death]")
        resolved["death"], ctx["death"] = _resolve_death_kernel(raw["death"])
    if needs_model or "mover" in raw:
        if "mover" not in raw:
            raise ConfigError("missing required section [mover]")
        resolved["mover"], ctx["mover"] = _resolve_mover(raw["mover"], ctx["g"])
    if command in ("couple", "check-ergodicity") or "chain" in raw:
        if "chain" not in raw:
            raise ConfigError("missing required section [chain]")
        resolved["chain"], ctx["chain"], ctx["gamma"] = _resolve_chain(raw["chain"])

    run_spec = _RUN_SPECS[command]
    if run_spec:
        resolved["run"] = _resolve_keys("run", raw.get("run", {}), run_spec)
        ctx["run"] = resolved["run"]
        if command == "diagnose":
            if not resolved["run"]["functions"]:
                raise ConfigError("[run].functions must not be empty")
            fres, fns = _resolve_functions(resolved["run"]["functions"])
            resolved["run"]["functions"] = fres
            ctx["functions"] = fns
    elif "run" in raw:
        _resolve_keys("run", raw["run"], [])

    if needs_model:
        try:
            ctx["model"] = ModelSpec(ctx["domain"], ctx["intensities"],
                                     ctx["birth"], ctx["death"], ctx["mover"])
        except (ValueError, BdmoveError) as e:
            raise ConfigError(f"model validation: {e}") from None
        initial = ctx.get("run", {}).get("initial", [])
        try:
            ctx["x0"] = Configuration(ctx["domain"], initial if initial else None)
        except BdmoveError as e:
            raise ConfigError(f"[run].initial: {e}") from None
    return resolved, ctx


# ---------------------------------------------------------------------------
# deterministic TOML echo

def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(float(v))
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(u) for u in v) + "]"
    if isinstance(v, dict):
        inner = ", ".join(f"{k} = {_toml_value(u)}" for k, u in v.items())
        return "{" + inner + "}"
    raise TypeError(f"cannot emit {type(v).__name__} as TOML")


def emit_toml(resolved) -> str:
    lines = [f"{k} = {_toml_value(v)}" for k, v in resolved.items()
             if not isinstance(v, dict)]
    for k, v in resolved.items():
        if isinstance(v, dict):
            lines.append("")
            lines.append(f"[{k}]")
            lines.extend(f"{kk} = {_toml_value(vv)}" for kk, vv in v.items())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands

def _write_out(out_path, text):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_simulate(ctx, out_path):
    run = ctx["run"]
    log = simulate(ctx["model"], ctx["x0"], run["horizon"],
                   checkpoints=run["checkpoints"], seed=ctx["seed"],
                   trajectory=0, points_cap=run["points_cap"])
    _write_out(out_path, trajectory_to_jsonl(log, ctx["model"], ctx["seed"]))
    final = log.count_at(run["horizon"])
    print(f"simulate: {len(log.events)} events, "
          f"{len(log.checkpoints)} checkpoints, final count {final}")
    return EXIT_OK


def cmd_couple(ctx, out_path):
    run = ctx["run"]
    t_list = [_want_float("[run].t_list entry", t) for t in run["t_list"]]
    rep = coupling_check(ctx["model"], ctx["chain"], ctx["x0"], run["n0"],
                         t_list, run["trials"], seed=ctx["seed"])
    _write_out(out_path, report_to_jsonl("coupling", rep))
    print(f"couple: claim1 min p={min(rep['claim1_pvalues']):.4f}, "
          f"claim2 min p={min(rep['claim2_pvalues']):.4f}, "
          f"violations={rep['claim3_violations']}, pass={rep['pass']}")
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def cmd_check_ergodicity(ctx, out_path):
    try:
        erg = ergodicity_check(ctx["chain"])
        print(f"ergodicity: {erg['verdict']} ({erg['rationale']})")
        final = erg["verdict"]
        if ctx.get("gamma") is not None:
            rate = rate_condition_check(ctx["chain"], ctx["gamma"])
            print(f"rate condition: {rate['verdict']} ({rate['rationale']})")
            if erg["verdict"] != "Fails":
                final = rate["verdict"]
    except ValueError as e:
        raise ConfigError(f"[chain]: {e}") from None
    if final in _PASS_VERDICTS:
        return EXIT_OK
    return EXIT_FAIL if final == "Fails" else EXIT_INCONCLUSIVE


def cmd_gibbs_validate(ctx, out_path):
    run = ctx["run"]
    sweeps = run["oracle_sweeps"] if run["oracle_sweeps"] > 0 else None
    if run["calibration"]:
        n = sweeps if sweeps else max(100_000, 30 * run["n_samples"])
        a = mcmc_gibbs_oracle(ctx["g"], ctx["domain"], n, seed=ctx["seed"])
        b = mcmc_gibbs_oracle(ctx["g"], ctx["domain"], n, seed=ctx["seed"] + 1)
        rep = compare_point_samples(a, b)
        rep["pass"] = bool(rep["count_law_distance"] <= COUNT_TV_GATE
                           and rep["pairdist_ks"] <= PAIRDIST_KS_GATE)
        label = "gibbs calibration"
    else:
        try:
            rep = gibbs_invariance_check(ctx["model"], run["burn_in"],
                                         run["n_samples"], seed=ctx["seed"],
                                         spacing=run["spacing"],
                                         oracle_sweeps=sweeps)
        except ValueError as e:
            raise ConfigError(f"gibbs-validate: {e}") from None
        label = "gibbs invariance"
    _write_out(out_path, report_to_jsonl("gibbs", rep))
    print(f"{label}: count TV={rep['count_law_distance']:.4f}, "
          f"NN KS={rep['pairdist_ks']:.4f}, pass={rep['pass']}")
    return EXIT_OK if rep["pass"] else EXIT_FAIL


def cmd_diagnose(ctx, out_path):
    run = ctx["run"]
    chunks = []
    all_pass = True
    for i, fn in enumerate(ctx["functions"]):
        rep = generator_check(ctx["model"], ctx["x0"], fn, run["h"],
                              run["trials"], seed=ctx["seed"] + i)
        all_pass &= rep["pass"]
        name = f"generator[{i}]"
        chunks.append(report_to_jsonl(name, rep))
        print(f"{name}: residual={rep['residual']:+.2e} "
              f"stderr={rep['mc_stderr']:.2e} pass={rep['pass']}")
    dom = poisson_domination_report(ctx["model"], ctx["x0"],
                                    run["domination_t"],
                                    run["domination_trials"],
                                    seed=ctx["seed"] + len(ctx["functions"]))
    all_pass &= dom["pass"]
    chunks.append(report_to_jsonl("domination", dom))
    print(f"domination: violations at levels {list(dom['violations'])}, "
          f"pass={dom['pass']}")
    _write_out(out_path, "".join(chunks))
    return EXIT_OK if all_pass else EXIT_FAIL


_COMMANDS = {
    "simulate": cmd_simulate,
    "couple": cmd_couple,
    "check-ergodicity": cmd_check_ergodicity,
    "gibbs-validate": cmd_gibbs_validate,
    "diagnose": cmd_diagnose,
}


# ---------------------------------------------------------------------------
# entry point

def build_parser():
    parser = argparse.ArgumentParser(
        prog="bdmove",
        description="Simulation and validation engine for birth-death-move "
                    "processes on finite point configurations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML configuration file")
        p.add_argument("--out", default=None, help="output artifact path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured seed")
        p.add_argument("--trials", type=int, default=None,
                       help="override [run].trials")
    return parser


def _load_raw(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"configuration file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"invalid TOML: {e}") from None


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        raw = _load_raw(ns.config)
        if ns.seed is not None:
            raw["seed"] = ns.seed
        if ns.trials is not None:
            run_keys = {k for k, _, _ in _RUN_SPECS[ns.command]}
            if "trials" not in run_keys:
                raise ConfigError(f"--trials is not used by '{ns.command}'")
            raw.setdefault("run", {})["trials"] = ns.trials
        resolved, ctx = resolve_config(raw, ns.command)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(emit_toml(resolved))
    print("---")
    try:
        return _COMMANDS[ns.command](ctx, ns.out)
    except BdmoveError as e:
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
