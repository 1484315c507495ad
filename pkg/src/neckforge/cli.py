"""Command-line front end: config parsing, dispatch, and CSV emission.

Config files are line-oriented ``key = value`` with ``#`` comments and one
``[section]`` per command (plus ``[global]``); the flat schema keeps the
format parseable with a dozen lines in any language.  CLI flags override
file values.  All floats are printed with 17 significant digits so output
can be compared across languages bit-for-bit; bodies are byte-identical
between runs, and the only timestamp lives in a comment header that
``--deterministic`` suppresses.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 acceptance
(or lemma-suite) failure.
"""

from __future__ import annotations

import argparse
import datetime
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import (ConfigError, Diverged, NeckforgeError, NumericalError,
                     ParseError, ValidationError)

FORMAT_VERSION = 1
COMMANDS = ("symbol", "indicial", "check-lemma", "green",
            "extension-validate", "glue", "solve", "accept")


# --------------------------------------------------------------------------
# value coercers: each takes the raw string (config file or flag) and the key
# name, returns the typed value, and raises ValidationError naming the key.

def _fail(key, raw, want):
    raise ValidationError(f"key '{key}': cannot read {raw!r} as {want}")


def _as_int(raw, key):
    try:
        return int(str(raw).strip())
    except ValueError:
        _fail(key, raw, "an integer")


def _as_float(raw, key):
    try:
        return float(str(raw).strip())
    except ValueError:
        _fail(key, raw, "a number")


def _as_bool(raw, key):
    if isinstance(raw, bool):
        return raw
    word = str(raw).strip().lower()
    if word in ("true", "yes", "1", "on"):
        return True
    if word in ("false", "no", "0", "off"):
        return False
    _fail(key, raw, "a boolean")


def _as_str(raw, key):
    return str(raw).strip()


def _choice(*options):
    def coerce(raw, key):
        word = str(raw).strip()
        if word not in options:
            raise ValidationError(f"key '{key}': {word!r} not one of {options}")
        return word
    return coerce


def _int_range(raw, key):
    """Integer set: '0..4' (inclusive), '1,3,5', or a single value."""
    text = str(raw).strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        a, b = _as_int(lo, key), _as_int(hi, key)
        if b < a:
            raise ValidationError(f"key '{key}': empty range {text!r}")
        return list(range(a, b + 1))
    if "," in text:
        return [_as_int(t, key) for t in text.split(",")]
    return [_as_int(text, key)]


def _float_grid(raw, key):
    """Float set: 'a:step:b' (inclusive grid), 'x,y,z', or a single value."""
    text = str(raw).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"key '{key}': grid must be start:step:stop")
        a, h, b = (_as_float(t, key) for t in parts)
        if h <= 0 or b < a:
            raise ValidationError(f"key '{key}': bad grid {text!r}")
        count = int(round((b - a) / h)) + 1
        return [a + i * h for i in range(count) if a + i * h <= b + 1e-12 * h]
    if "," in text:
        return [_as_float(t, key) for t in text.split(",")]
    return [_as_float(text, key)]


def _float_in(lo, hi):
    def coerce(raw, key):
        x = _as_float(raw, key)
        if not (lo < x < hi):
            raise ValidationError(f"key '{key}': {x} outside ({lo}, {hi})")
        return x
    return coerce


def _pos_int(raw, key):
    v = _as_int(raw, key)
    if v < 1:
        raise ValidationError(f"key '{key}': must be >= 1, got {v}")
    return v


# schema: key -> (coercer, default).  None default = computed or optional.
_GLOBAL = {
    "threads": (_pos_int, None),
    "seed": (_as_int, 20260813),
    "out": (_as_str, None),
    "deterministic": (_as_bool, False),
}

_SCHEMAS = {
    "symbol": {
        "n": (_pos_int, 3),
        "gamma": (_float_in(0.0, 1.0), 0.5),
        "m": (_int_range, [0]),
        "xi": (_float_grid, [0.0]),
    },
    "indicial": {
        "n": (_pos_int, 3),
        "gamma": (_float_in(0.0, 1.0), 0.5),
        "m": (_int_range, [0]),
        "j_count": (_pos_int, 3),
    },
    "check-lemma": {
        "n": (_int_range, [2, 3, 4, 5]),
        "m_max": (_pos_int, 6),
        "j_max": (_pos_int, 3),
        "tol_b": (_as_float, 1e-8),
    },
    "green": {
        "n": (_pos_int, 3),
        "gamma": (_float_in(0.0, 1.0), 0.5),
        "m": (_int_range, [0]),
        "delta": (_as_float, 0.5),
        "half_window": (_as_float, 30.0),
        "points": (_pos_int, 4096),
        "beta": (_as_float, None),
    },
    "extension-validate": {
        "n": (_int_range, [2, 3]),
        "m": (_int_range, [0, 1, 2, 3, 4]),
        "xi": (_float_grid, [0.0, 0.5, 1.0, 2.0, 4.0]),
        "phi_grid": (_pos_int, 1024),
        "scheme": (_choice("collocation-ODE", "finite-difference"), "collocation-ODE"),
    },
    "glue": {
        "sweep": (_as_bool, False),
        "eps": (_float_grid, [1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3]),
        "epsilon": (_float_in(0.0, 0.25), None),
        "n": (_pos_int, 3),
        "mu": (_as_float, -0.5),
        "n_s": (_pos_int, 4096),
        "pad": (_as_float, 4.0),
        "perturbation": (_as_bool, True),
        "weight_convention": (_choice("centered", "paper-literal"), "centered"),
    },
    "solve": {
        "n": (_pos_int, 3),
        "m_max": (_pos_int, 8),
        "n_s": (_pos_int, 256),
        "modes": (_int_range, [1, 2]),
        "amplitude": (_as_float, 0.01),
        "method": (_choice("newton", "fixed-point"), "newton"),
        "tol": (_as_float, 1e-11),
        "max_iter": (_pos_int, 40),
        "mu": (_as_float, -0.5),
    },
    "accept": {
        "criteria": (_int_range, None),
    },
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")


def _known_keys(command: str) -> dict:
    merged = dict(_GLOBAL)
    merged.update(_SCHEMAS[command])
    return merged


def _parse_file(path: str) -> dict:
    """Raw sections: {section: {key: value-string}}; line numbers in errors."""
    sections: dict = {}
    current = "global"
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]") or len(line) < 3:
                    raise ParseError(f"malformed section header {raw.strip()!r}",
                                     line=lineno)
                name = line[1:-1].strip()
                if name != "global" and name not in COMMANDS:
                    raise ValidationError(f"unknown section '{name}'"
                                          f" (line {lineno})")
                current = name
                continue
            key, eq, value = line.partition("=")
            if not eq or not key.strip():
                raise ParseError(f"expected 'key = value', got {raw.strip()!r}",
                                 line=lineno)
            norm = key.strip().replace("-", "_")
            sections.setdefault(current, {})[norm] = value.strip()
    return sections


def load_config(path: str | None, command: str | None = None,
                overrides: dict | None = None) -> RunConfig:
    """Merge defaults <- file [global] <- file [command] <- CLI flags."""
    sections = _parse_file(path) if path else {}
    file_command = sections.get("global", {}).pop("command", None)
    command = command or file_command
    if command is None:
        raise ValidationError("no command given (flag or 'command =' in [global])")
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}")

    schema = _known_keys(command)
    raw: dict = {}
    for section in ("global", command):
        for key, value in sections.get(section, {}).items():
            if key not in schema:
                raise ValidationError(f"unknown key '{key}' for command "
                                      f"'{command}'")
            raw[key] = value
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in schema:
            raise ValidationError(f"unknown key '{key}' for command '{command}'")
        raw[key] = value

    params = {}
    for key, (coerce, default) in schema.items():
        if key in raw:
            params[key] = coerce(raw[key], key)
        else:
            params[key] = default
    if params["threads"] is None:
        env = os.environ.get("NECKFORGE_THREADS")
        params["threads"] = _pos_int(env, "threads") if env else (os.cpu_count() or 1)
    return RunConfig(command=command, parameters=params)


# --------------------------------------------------------------------------
# emission

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _config_text(config: RunConfig) -> str:
    parts = []
    for key in sorted(config.parameters):
        val = config.parameters[key]
        if val is None:
            continue
        if isinstance(val, (list, tuple)):
            parts.append(f"{key}={','.join(_fmt(v) for v in val)}")
        else:
            parts.append(f"{key}={_fmt(val)}")
    return "; ".join(parts)


def _emit(config: RunConfig, columns, rows, stream=None):
    """CSV with a comment header recording the full config and version."""
    out_path = config.parameters.get("out")
    close = False
    if stream is None:
        if out_path:
            stream = open(out_path, "w", encoding="utf-8", newline="\n")
            close = True
        else:
            stream = sys.stdout
    try:
        stream.write(f"# neckforge {__version__} format={config.format_version} "
                     f"command={config.command}\n")
        stream.write(f"# config: {_config_text(config)}\n")
        if not config.parameters.get("deterministic"):
            now = datetime.datetime.now(datetime.timezone.utc).isoformat()
            stream.write(f"# generated: {now}\n")
        stream.write(",".join(columns) + "\n")
        for row in rows:
            stream.write(",".join(_fmt(v) for v in row) + "\n")
    finally:
        if close:
            stream.close()


# --------------------------------------------------------------------------
# command runners: parameters dict -> exit code

def _run_symbol(config: RunConfig) -> int:
    from .symbol import ModeSpec, theta
    p = config.parameters
    rows = []
    for m in p["m"]:
        spec = ModeSpec(n=p["n"], gamma=p["gamma"], m=m)
        for xi in p["xi"]:
            rows.append((p["n"], p["gamma"], m, xi, float(theta(spec, xi))))
    _emit(config, ("n", "gamma", "m", "xi", "theta"), rows)
    return 0


def _run_indicial(config: RunConfig) -> int:
    from .indicial import root_catalog
    from .symbol import ModeSpec
    p = config.parameters
    rows = []
    for m in p["m"]:
        spec = ModeSpec(n=p["n"], gamma=p["gamma"], m=m)
        cat = root_catalog(spec, p["j_count"])
        for j, root in enumerate(cat.roots):
            rows.append((p["n"], p["gamma"], m, j, root.sigma, root.tau))
    _emit(config, ("n", "gamma", "m", "j", "sigma", "tau"), rows)
    return 0


def _run_check_lemma(config: RunConfig) -> int:
    from .indicial import check_lemma
    p = config.parameters
    rows, all_ok = [], True
    for n in p["n"]:
        rep = check_lemma(n, gamma=0.5, m_max=p["m_max"], j_max=p["j_max"],
                          tol_b=p["tol_b"])
        all_ok = all_ok and rep.passed
        rows.append((n, rep.tau0, rep.clause_a, rep.clause_b,
                     rep.clause_c, rep.clause_d, rep.passed))
    _emit(config, ("n", "tau0", "clause_a", "clause_b", "clause_c",
                   "clause_d", "passed"), rows)
    return 0 if all_ok else 4


def _run_green(config: RunConfig) -> int:
    from .modegreen import (DecayProfile, LineFunction, fit_tail_rate,
                            green_solve)
    from .symbol import ModeSpec
    p = config.parameters
    delta, half, N = p["delta"], p["half_window"], p["points"]
    rows = []
    for m in p["m"]:
        spec = ModeSpec(n=p["n"], gamma=p["gamma"], m=m)
        h = LineFunction.from_callable(
            lambda s: np.exp(-delta * np.sqrt(s * s + 4.0)),
            s0=-half, s1=half, N=N, mode=m)
        v = green_solve(spec, h, DecayProfile(delta=delta), beta=p["beta"])
        s, vals = v.grid(), v.materialize()
        fit_p = fit_tail_rate(v, "+")
        fit_m = fit_tail_rate(v, "-")
        for i in range(N):
            rows.append((m, s[i], h.values[i], vals[i]))
        print(f"# mode {m}: fitted tail rates {_fmt(fit_m)} / {_fmt(fit_p)} "
              f"(declared +/-{_fmt(delta)})", file=sys.stderr)
    _emit(config, ("m", "s", "rhs", "solution"), rows)
    return 0


def _run_extension_validate(config: RunConfig) -> int:
    from .extension import cross_validate
    p = config.parameters
    rows = []
    for n in p["n"]:
        for r in cross_validate(n, p["m"], p["xi"], phi_grid=p["phi_grid"],
                                scheme=p["scheme"], threads=p["threads"]):
            rows.append((r["n"], r["m"], r["xi"], r["dtn"], r["theta"],
                         r["rel_err"]))
    _emit(config, ("n", "m", "xi", "dtn", "theta", "rel_err"), rows)
    return 0


def _run_glue(config: RunConfig) -> int:
    from .neck import WeightedNormSpec, error_sweep
    p = config.parameters
    eps_list = [p["epsilon"]] if p["epsilon"] is not None else list(p["eps"])
    if not p["sweep"] and p["epsilon"] is None:
        eps_list = eps_list[:1]
    norm = WeightedNormSpec(mu=p["mu"], k=0)
    rows = [(r["epsilon"], r["S_eps"], r["delta"], r["E"])
            for r in error_sweep(p["n"], eps_list, norm, threads=p["threads"],
                                 n_s=p["n_s"], pad=p["pad"],
                                 perturbation=p["perturbation"],
                                 weight_convention=p["weight_convention"])]
    _emit(config, ("epsilon", "S", "delta", "E"), rows)
    return 0


def _run_solve(config: RunConfig) -> int:
    from .neck import WeightedNormSpec
    from .solver import PeriodicCylinderState, newton_solve
    p = config.parameters
    state = PeriodicCylinderState.ones(p["n"], m_max=p["m_max"], N_s=p["n_s"])
    f_hat = state.f_hat.copy()
    for m in p["modes"]:
        if not 0 <= m <= p["m_max"]:
            raise ValidationError(f"key 'modes': mode {m} outside 0..{p['m_max']}")
        f_hat[m, 1] += 0.5 * state.N_s * p["amplitude"]
        f_hat[m, -1] += 0.5 * state.N_s * p["amplitude"]
    start = state.with_table(f_hat)
    report = newton_solve(start, WeightedNormSpec(mu=p["mu"], k=0),
                          tol=p["tol"], max_iter=p["max_iter"],
                          method=p["method"])
    print(f"# method={report.method} iterations={report.iterations} "
          f"converged={report.converged}", file=sys.stderr)
    for note in report.notes:
        print(f"# {note}", file=sys.stderr)
    rows = [(k, r) for k, r in enumerate(report.residual_history)]
    _emit(config, ("step", "residual"), rows)
    return 0 if report.converged else 3


def _run_accept(config: RunConfig) -> int:
    from .acceptance import format_line, run_all
    p = config.parameters
    indices = set(p["criteria"]) if p["criteria"] else None
    results = run_all(indices=indices, echo=True)
    if p.get("out"):
        with open(p["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# neckforge {__version__} format={config.format_version} "
                     f"command=accept\n")
            for r in results:
                fh.write(format_line(r) + "\n")
    return 0 if results and all(r.passed for r in results) else 4


_RUNNERS = {
    "symbol": _run_symbol,
    "indicial": _run_indicial,
    "check-lemma": _run_check_lemma,
    "green": _run_green,
    "extension-validate": _run_extension_validate,
    "glue": _run_glue,
    "solve": _run_solve,
    "accept": _run_accept,
}


def run(config: RunConfig) -> int:
    np.random.seed(config.parameters.get("seed", 0) % (2**32))
    return _RUNNERS[config.command](config)


# --------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a key = value config file")
    common.add_argument("--threads", help="worker threads "
                        "(default: NECKFORGE_THREADS or all cores)")
    common.add_argument("--seed", help="RNG seed recorded in output headers")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--deterministic", action="store_const", const="true",
                        help="suppress timestamps for byte-identical output")

    parser = argparse.ArgumentParser(
        prog="neckforge",
        description="Numerics for glued-cylinder boundary-curvature problems.")
    parser.add_argument("--version", action="version",
                        version=f"neckforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    flags = {
        "symbol": ["--n", "--gamma", "--m", "--xi"],
        "indicial": ["--n", "--gamma", "--m", "--j-count"],
        "check-lemma": ["--n", "--m-max", "--j-max", "--tol-b"],
        "green": ["--n", "--gamma", "--m", "--delta", "--half-window",
                  "--points", "--beta"],
        "extension-validate": ["--n", "--m", "--xi", "--phi-grid", "--scheme"],
        "glue": ["--eps", "--epsilon", "--n", "--mu", "--n-s", "--pad",
                 "--weight-convention"],
        "solve": ["--n", "--m-max", "--n-s", "--modes", "--amplitude",
                  "--method", "--tol", "--max-iter", "--mu"],
        "accept": ["--criteria"],
    }
    helps = {
        "symbol": "evaluate the boundary symbol on a frequency grid",
        "indicial": "tabulate certified indicial roots",
        "check-lemma": "run the exponent-lemma clause suite",
        "green": "solve the mode-wise line problem for a canonical source",
        "extension-validate": "cross-check the symbol against the bulk ODE",
        "glue": "approximate-curvature error for glued necks",
        "solve": "nonlinear curvature solve on the periodic cylinder",
        "accept": "run the acceptance suite",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=helps[name])
        for flag in flags[name]:
            sp.add_argument(flag)
        if name == "glue":
            sp.add_argument("--sweep", action="store_const", const="true")
            sp.add_argument("--perturbation", dest="perturbation")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    overrides = {k: v for k, v in vars(ns).items()
                 if k not in ("command", "config") and v is not None}
    try:
        config = load_config(ns.config, command=ns.command, overrides=overrides)
        return run(config)
    except ConfigError as exc:
        print(f"neckforge: config error: {exc}", file=sys.stderr)
        return 2
    except Diverged as exc:
        print(f"neckforge: solver diverged: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"neckforge: numerical failure: {exc}", file=sys.stderr)
        return 3
    except NeckforgeError as exc:
        print(f"neckforge: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
