"""Batch front end: configuration-driven runs with CSV/JSON emission.

One command per invocation; parameters come from a JSON config file,
command-line flags, or both (flags override the file).  Every output
embeds the resolved config echo and the library version, so identical
configs reproduce identical files: byte-identical on the exact-rational
paths (perturb/coulomb/stark), within printed tolerance elsewhere.

Exit codes: 0 ok, 1 config error, 2 method breakdown (e.g. a radial
log singularity), 3 tolerance failure (an identity check above bound).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import __version__
from .errors import ConfigError, MethodError, ToleranceError, TrajquadError
from .exactalg import VAR_EPS, VAR_GHAT, VAR_R, VAR_U, parse_poly
from . import coulomb as coulomb_mod
from . import excited as excited_mod
from . import gexpand as gexpand_mod
from . import greens as greens_mod
from . import oracle as oracle_mod
from . import oscpert as oscpert_mod
from . import trajectory as trajectory_mod

COMMANDS = ("gexpand", "perturb", "coulomb", "stark", "greens-check",
            "excited", "oracle")

RUE = (VAR_R, VAR_U, VAR_EPS)


def _positive(x) -> bool:
    return x > 0


def _non_negative(x) -> bool:
    return x >= 0


# command -> key -> (type, default, validator); required keys default to None
_SCHEMAS = {
    "gexpand": {
        "potential": (str, None, None),
        "x-max": (float, 2.5, _positive),
        "n": (int, 2001, lambda v: v >= 16),
        "order": (int, 3, lambda v: 0 <= v <= gexpand_mod.MAX_ORDER),
        "g": (float, 1.0, _positive),
        "origin": (float, 0.0, None),
        "direction": (int, 1, lambda v: v in (-1, 1)),
    },
    "perturb": {
        "parity": (str, None, lambda v: v in ("even", "odd")),
        "p": (int, None, _non_negative),
        "order": (int, 2, _non_negative),
        "g": (float, 1.0, _positive),
    },
    "coulomb": {
        "potential": (str, "r^2", None),
        "order": (int, 8, lambda v: v >= 1),
        "g": (float, 1.0, _positive),
        "eps": (float, 0.0, None),
    },
    "stark": {
        "order": (int, 12, lambda v: v >= 2),
        "g": (float, 1.0, _positive),
        "eps": (float, 0.0, None),
    },
    "greens-check": {
        "g": (float, 1.0, _positive),
        "n": (int, 4001, lambda v: v >= 101),
        "half-width": (float, 8.0, _positive),
    },
    "excited": {
        "freqs": (str, "1", None),
        "occupations": (str, None, None),
    },
    "oracle": {
        "potential": (str, None, None),
        "mode": (str, "1d", lambda v: v in ("1d", "radial")),
        "domain": (float, 8.0, _positive),
        "n": (int, 1200, lambda v: v >= 200),
        "k": (int, 1, _positive),
        "g": (float, 1.0, _positive),
        "eps": (float, 0.0, None),
    },
}


@dataclass
class RunConfig:
    """Validated command plus parameter map (unknown keys rejected)."""

    command: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        schema = _SCHEMAS[self.command]
        unknown = set(self.parameters) - set(schema)
        if unknown:
            raise ConfigError(f"unknown keys for {self.command}: {sorted(unknown)}")
        resolved = {}
        for key, (kind, default, check) in schema.items():
            value = self.parameters.get(key, default)
            if value is None:
                raise ConfigError(f"{self.command} requires --{key}")
            try:
                value = kind(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
            if check is not None and not check(value):
                raise ConfigError(f"value out of range for {key!r}: {value!r}")
            resolved[key] = value
        self.parameters = resolved

    def to_dict(self) -> dict:
        return {"command": self.command, **self.parameters}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        try:
            command = data.pop("command")
        except KeyError:
            raise ConfigError("config must name a command") from None
        return cls(command=command, parameters=data)


def _echo(config: RunConfig) -> dict:
    return {"version": __version__, "config": config.to_dict()}


def parse_config_echo(text: str) -> RunConfig:
    """Recover the RunConfig from an emitted CSV or JSON document."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return RunConfig.from_dict(json.loads(stripped)["config"])
    for line in text.splitlines():
        if line.startswith("# config: "):
            return RunConfig.from_dict(json.loads(line[len("# config: "):]))
    raise ConfigError("no config echo found")


def _csv_header(config: RunConfig) -> list:
    return [f"# trajquad {__version__}",
            f"# config: {json.dumps(config.to_dict(), sort_keys=True)}"]


def _run_gexpand(p: dict):
    pot = trajectory_mod.Potential1D.from_poly(p["potential"], origin=p["origin"])
    grid = trajectory_mod.build_grid(pot, p["x-max"], p["n"],
                                     direction=p["direction"])
    sol = gexpand_mod.hierarchy(grid, p["order"])
    energy = gexpand_mod.assemble_energy(sol, p["g"])
    payload = {
        "e_terms": list(sol.e_terms),
        "assembled_energy": energy,
        "nodes": grid.nodes.tolist(),
        "s_terms": [s.tolist() for s in sol.s_terms],
    }
    lines = ["k,E_k"]
    lines += [f"{k},{e!r}" for k, e in enumerate(sol.e_terms)]
    lines.append(f"assembled,{energy!r}")
    lines.append("x," + ",".join(f"S_{k}" for k in range(1, sol.order + 1)))
    for i, x in enumerate(grid.nodes):
        lines.append(",".join([repr(float(x))] +
                              [repr(float(s[i])) for s in sol.s_terms]))
    return payload, lines


def _run_perturb(p: dict):
    solver = oscpert_mod.solve_even if p["parity"] == "even" \
        else oscpert_mod.solve_odd
    if p["parity"] == "even" and p["p"] < 1:
        raise ConfigError("even perturbations need p >= 1")
    series = solver(p["p"], p["order"])
    rows = []
    for k, delta in enumerate(series.delta, start=1):
        rows.append({"k": k, "delta_exact": delta.render(),
                     "delta_at_g": delta.evaluate({VAR_GHAT: 1.0 / p["g"]})})
    payload = {"parity": p["parity"], "p": p["p"], "deltas": rows,
               "shift_polynomial": series.shift_polynomial().render()}
    lines = ["k,delta_exact,delta_at_g"]
    lines += [f"{r['k']},\"{r['delta_exact']}\",{r['delta_at_g']!r}" for r in rows]
    return payload, lines


def _coulomb_tables(sol, g: float, eps: float):
    assembled = coulomb_mod.assemble(sol, g, eps)
    payload = {
        "e_terms": [e.render() for e in sol.e_terms],
        "s_terms": [s.render() for s in sol.s_terms],
        "assembled_symbolic": sol.assemble_energy_symbolic(),
        "assembled_energy": assembled["E"],
    }
    lines = ["n,E_n,S_n"]
    for n, (e, s) in enumerate(zip(sol.e_terms, sol.s_terms)):
        lines.append(f"{n},\"{e.render()}\",\"{s.render()}\"")
    lines.append(f"assembled_symbolic,\"{sol.assemble_energy_symbolic()}\"")
    lines.append(f"assembled_energy,{assembled['E']!r}")
    return payload, lines


def _run_coulomb(p: dict):
    u_poly = parse_poly(p["potential"], RUE)
    sol = coulomb_mod.solve_isotropic(u_poly, p["order"])
    return _coulomb_tables(sol, p["g"], p["eps"])


def _run_stark(p: dict):
    sol = coulomb_mod.solve_stark(p["order"])
    return _coulomb_tables(sol, p["g"], p["eps"])


def _run_greens_check(p: dict):
    report = greens_mod.identity_report(p["g"], p["n"], p["half-width"])
    payload = {"checks": report}
    lines = ["identity,grid,max_residual,tolerance,pass"]
    lines += [f"{r['identity']},{r['grid']},{r['max_residual']!r},"
              f"{r['tolerance']!r},{r['pass']}" for r in report]
    if not all(r["pass"] for r in report):
        worst = max(report, key=lambda r: r["max_residual"] / r["tolerance"])
        raise ToleranceError(
            f"identity {worst['identity']} at {worst['max_residual']:.3e} "
            f"exceeds {worst['tolerance']:.0e}", payload, lines)
    return payload, lines


def _run_excited(p: dict):
    freqs = tuple(s.strip() for s in p["freqs"].split(","))
    occupations = [tuple(int(v) for v in block.split(","))
                   for block in p["occupations"].split(";")]
    groups = excited_mod.degenerate_multiplets(freqs, occupations)
    group_id = {energy: i for i, energy in enumerate(sorted(groups))}
    rows = []
    for occ in occupations:
        spec = excited_mod.ExcitedSpec(freqs, occ)
        chi0, e0 = excited_mod.chi0_e0(spec)
        chi1 = excited_mod.chi1_harmonic(spec)
        rows.append({
            "occupation": list(occ),
            "E0": str(e0),
            "E1": "0",
            "chi0": chi0.render(),
            "chi1": chi1.render(),
            "multiplet": group_id[e0],
        })
    payload = {"freqs": [str(f) for f in freqs], "levels": rows}
    lines = ["occupation,E0,E1,chi0,chi1,multiplet"]
    lines += [f"\"{','.join(map(str, r['occupation']))}\",{r['E0']},{r['E1']},"
              f"\"{r['chi0']}\",\"{r['chi1']}\",{r['multiplet']}" for r in rows]
    return payload, lines


def _run_oracle(p: dict):
    if p["mode"] == "1d":
        pot = trajectory_mod.Potential1D.from_poly(p["potential"])
        result = oracle_mod.solve_1d(pot.v, (-p["domain"], p["domain"]),
                                     p["n"], p["k"])
    else:
        u_poly = parse_poly(p["potential"], RUE)
        u_fn = lambda r: u_poly.evaluate({VAR_R: r, VAR_U: 0.0, VAR_EPS: 1.0})
        result = oracle_mod.solve_radial(p["g"], u_fn, p["eps"],
                                         p["domain"], p["n"])
    payload = {"eigenvalues": list(result.eigenvalues),
               "convergence": list(result.convergence),
               "domain": list(result.domain), "points": result.points}
    lines = ["k,eigenvalue,error_estimate"]
    lines += [f"{k},{e!r},{c!r}" for k, (e, c) in
              enumerate(zip(result.eigenvalues, result.convergence))]
    return payload, lines


_RUNNERS = {
    "gexpand": _run_gexpand,
    "perturb": _run_perturb,
    "coulomb": _run_coulomb,
    "stark": _run_stark,
    "greens-check": _run_greens_check,
    "excited": _run_excited,
    "oracle": _run_oracle,
}


def _write(out, fmt: str, config: RunConfig, payload: dict, lines: list) -> None:
    if fmt == "json":
        document = {**_echo(config), "results": payload}
        text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    else:
        text = "\n".join(_csv_header(config) + lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(config: RunConfig, out=None, fmt: str = "csv") -> int:
    """Execute one command, emit its artifact, return the exit status."""
    try:
        payload, lines = _RUNNERS[config.command](config.parameters)
    except ToleranceError as exc:
        if len(exc.args) == 3:
            _write(out, fmt, config, exc.args[1], exc.args[2])
        raise
    _write(out, fmt, config, payload, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trajquad",
        description="Trajectory-quadrature energies, series and checks")
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--command", choices=COMMANDS)
    parser.add_argument("--out", help="output path (stdout when omitted)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--g", type=float, help="potential scale g")
    parser.add_argument("--eps", type=float, help="perturbation strength ε")
    parser.add_argument("--order", type=int, help="expansion order")
    parser.add_argument("--potential", help="polynomial in x (or r)")
    parser.add_argument("--x-max", type=float, help="trajectory extent")
    parser.add_argument("--origin", type=float, help="potential minimum")
    parser.add_argument("--direction", type=int, help="trajectory direction ±1")
    parser.add_argument("--n", type=int, help="grid point count")
    parser.add_argument("--k", type=int, help="eigenvalue count (oracle)")
    parser.add_argument("--parity", choices=("even", "odd"))
    parser.add_argument("--p", type=int, help="perturbation half-degree")
    parser.add_argument("--half-width", type=float, help="greens grid half width")
    parser.add_argument("--mode", choices=("1d", "radial"), help="oracle mode")
    parser.add_argument("--domain", type=float,
                        help="oracle half width (1d) or r_max (radial)")
    parser.add_argument("--freqs", help="comma-separated frequencies")
    parser.add_argument("--occupations",
                        help="semicolon-separated occupation tuples")
    return parser


def _config_from_args(args) -> RunConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    flag_keys = {"g": "g", "eps": "eps", "order": "order",
                 "potential": "potential", "x_max": "x-max", "n": "n",
                 "k": "k", "parity": "parity", "p": "p",
                 "half_width": "half-width", "mode": "mode",
                 "domain": "domain", "freqs": "freqs", "origin": "origin",
                 "direction": "direction", "occupations": "occupations"}
    for attr, key in flag_keys.items():
        value = getattr(args, attr)
        if value is not None:
            data[key] = value
    if args.command:
        data["command"] = args.command
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        return run(config, out=args.out, fmt=args.format)
    except BrokenPipeError:
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ToleranceError as exc:
        print(f"tolerance failure: {exc.args[0]}", file=sys.stderr)
        return 3
    except MethodError as exc:
        print(f"method breakdown: {exc}", file=sys.stderr)
        return 2
    except TrajquadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
