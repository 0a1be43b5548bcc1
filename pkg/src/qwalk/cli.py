"""Command-line front end: ``qwalk simulate | polya | verify | converge``.

Exit codes: 0 success, 1 a verification check failed, 2 the configuration
could not be parsed, 3 the coins are not mixing where a limit formula needs it.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import os
import sys
import tempfile
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from . import asymptotics, convergence, core, genfunc, observables, path_oracle
from .core import CoinMatrix, CoinSet, CoinState
from .errors import NonMixingCoinError, QWalkError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NONMIXING = 0, 1, 2, 3

SIMULATE_HEADER = ("j", "nu_cond", "nu_cond_limit_approx", "cdf_empirical", "cdf_limit")
POLYA_HEADER = ("closed_form", "series", "n_max", "gap")
CONVERGE_HEADER = ("n", "kolmogorov", "survival_gap")

STATE_TOL = 1e-6


class ConfigError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    coins: CoinSet
    coin_state: CoinState
    steps: int
    out: str | None = None
    ladder: tuple[int, ...] = convergence.DEFAULT_LADDER
    seed: int = 0
    perturb: float = 0.0


# -- parsing -----------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_FUNCS = {"sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "tan": math.tan}
_NAMES = {"pi": math.pi}


def parse_number(text: str) -> float:
    """Evaluate a real arithmetic expression such as ``3*pi/8`` or ``sqrt(3)/2``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
        ):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse number {text!r}") from exc


def _numbers(text: str) -> list[float]:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def _raw_coin(values: Sequence[float]) -> CoinMatrix:
    entries = [complex(values[k], values[k + 1]) for k in range(0, 8, 2)]
    return CoinMatrix(*entries)


def parse_coin(text: str, field: str, allow_set: bool = False) -> CoinMatrix | CoinSet:
    """``hadamard``, ``rot:<angle>`` or ``raw:<re,im x 4>`` (24 numbers for a whole set)."""
    spec = text.strip()
    try:
        if spec.lower() == "hadamard":
            return core.hadamard()
        kind, _, body = spec.partition(":")
        kind = kind.lower()
        if kind == "rot" and body:
            return core.rotation(parse_number(body))
        if kind == "raw" and body:
            vals = _numbers(body)
            if len(vals) == 8:
                return _raw_coin(vals)
            if len(vals) == 24 and allow_set:
                return CoinSet(_raw_coin(vals[0:8]), _raw_coin(vals[8:16]), _raw_coin(vals[16:24]))
            expected = "8 or 24" if allow_set else "8"
            raise ValueError(f"raw coin needs {expected} numbers, got {len(vals)}")
    except QWalkError as exc:
        raise ConfigError(field, str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(field, str(exc)) from exc
    raise ConfigError(field, f"unknown coin {text!r} (use hadamard, rot:<angle> or raw:<numbers>)")


def parse_state(text: str) -> CoinState:
    """``re,im`` (two real amplitudes) or ``re,im,re,im`` (two complex amplitudes)."""
    try:
        vals = _numbers(text)
    except ValueError as exc:
        raise ConfigError("--state", str(exc)) from exc
    if len(vals) == 2:
        alpha, beta = complex(vals[0]), complex(vals[1])
    elif len(vals) == 4:
        alpha, beta = complex(vals[0], vals[1]), complex(vals[2], vals[3])
    else:
        raise ConfigError("--state", f"expected 2 or 4 numbers, got {len(vals)}")
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    if abs(norm * norm - 1.0) > STATE_TOL:
        raise ConfigError("--state", f"state is not normalized (|alpha|^2 + |beta|^2 = {norm * norm:.12g})")
    # typed decimals are only accurate to a few digits; restore exact normalization
    return CoinState(alpha / norm, beta / norm)


def _konno_coin(a_text: str, field: str) -> CoinMatrix:
    try:
        a = parse_number(a_text)
    except ValueError as exc:
        raise ConfigError(field, str(exc)) from exc
    if not 0.0 <= a <= 1.0:
        raise ConfigError(field, f"|a| must lie in [0, 1], got {a}")
    return core.rotation(math.acos(a))


def build_config(args: argparse.Namespace) -> RunConfig:
    base = parse_coin(args.coin, "--coin", allow_set=True)
    coins = base if isinstance(base, CoinSet) else CoinSet.homogeneous(base)
    for name in ("minus", "zero", "plus"):
        spec = getattr(args, f"coin_{name}")
        if spec is not None:
            coins = replace(coins, **{name: parse_coin(spec, f"--coin-{name}")})
    if getattr(args, "amin", None) is not None:
        coins = replace(coins, minus=_konno_coin(args.amin, "--amin"))
    if getattr(args, "aplus", None) is not None:
        coins = replace(coins, plus=_konno_coin(args.aplus, "--aplus"))
    state = parse_state(args.state)
    if args.steps is not None and args.steps < 1:
        raise ConfigError("--steps", f"must be >= 1, got {args.steps}")
    ladder = convergence.DEFAULT_LADDER
    if getattr(args, "ladder", None):
        try:
            ladder = tuple(int(t) for t in args.ladder.split(",") if t.strip())
        except ValueError as exc:
            raise ConfigError("--ladder", f"expected comma-separated integers, got {args.ladder!r}") from exc
        if not ladder or min(ladder) < 1:
            raise ConfigError("--ladder", "ladder points must be positive integers")
    return RunConfig(
        coins=coins,
        coin_state=state,
        steps=args.steps,
        out=args.out,
        ladder=ladder,
        seed=getattr(args, "seed", 0) or 0,
        perturb=getattr(args, "perturb", 0.0) or 0.0,
    )


# -- output ------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def format_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def read_csv(source: str) -> tuple[list[str], np.ndarray]:
    """Parse CSV text (or a path to a CSV file) written by this tool."""
    text = source
    if "\n" not in source and os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = [[float(v) for v in row] for row in reader if row]
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))


def write_output(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qwalk-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands ----------------------------------------------------------------


def _limit_model(cfg: RunConfig) -> asymptotics.DensityModel | None:
    try:
        return asymptotics.DensityModel.from_walk(cfg.coins, cfg.coin_state)
    except NonMixingCoinError:
        return None


def cmd_simulate(cfg: RunConfig) -> str:
    n = cfg.steps
    dist = observables.conditional_distribution(cfg.coin_state, cfg.coins, n)
    cdf = convergence.EmpiricalCDF.from_distribution(dist)
    sites = np.rint(cdf.jumps * n).astype(int)
    model = _limit_model(cfg)
    if model is not None:
        approx = [asymptotics.density_approximation(int(j), n, model) for j in sites]
        limit = model.cdf(cdf.jumps)
    else:
        approx = [math.nan] * len(sites)
        limit = np.full(len(sites), math.nan)
    rows = zip(sites, (dist[int(j)] for j in sites), approx, cdf.values, limit)
    return format_csv(SIMULATE_HEADER, rows)


def cmd_polya(cfg: RunConfig) -> str:
    closed = asymptotics.polya_closed_form(cfg.coins, cfg.coin_state)
    series = observables.polya_series(cfg.coin_state, cfg.coins, cfg.steps)
    return format_csv(POLYA_HEADER, [(closed, series, cfg.steps, abs(closed - series))])


def cmd_converge(cfg: RunConfig) -> str:
    report = convergence.convergence_ladder(cfg.coin_state, cfg.coins, cfg.ladder)
    return format_csv(CONVERGE_HEADER, zip(report.steps, report.kolmogorov, report.survival_gap))


def _random_coin(rng: np.random.Generator) -> CoinMatrix:
    return CoinMatrix.from_array(unitary_group.rvs(2, random_state=rng))


def _check(name: str, error: float, tol: float) -> dict:
    ok = bool(np.isfinite(error) and error <= tol)
    return {
        "name": name,
        "max_error": float(error) if np.isfinite(error) else None,
        "tolerance": tol,
        "pass": ok,
    }


def _oracle_error(coin_state: CoinState, coins: CoinSet, n_max: int) -> tuple[float, float]:
    """Max deviation of the oracle from the simulator off the origin, and of first returns."""
    amp_err, ret_err = 0.0, 0.0
    state = core.initial_state(coin_state)
    for n, (pre, post) in enumerate(core.iter_survival(state, coins, n_max), start=1):
        for j in range(-n, n + 1):
            ora = path_oracle.oracle_amplitude(coin_state, coins, n, j)
            if j == 0:
                q_sim = float(np.vdot(pre.amplitude(0), pre.amplitude(0)).real)
                ret_err = max(ret_err, abs(float(np.vdot(ora, ora).real) - q_sim))
            else:
                amp_err = max(amp_err, float(np.max(np.abs(ora - post.amplitude(j)))))
    return amp_err, ret_err


def _genfunc_error(coin_state: CoinState, coins: CoinSet, n_max: int, sites: Sequence[int]) -> float:
    states = [core.initial_state(coin_state)]
    for _ in range(n_max):
        states.append(core.survival_step(states[-1], coins))
    err = 0.0
    for j in sites:
        amps = genfunc.genfunc_amplitudes(coins, coin_state, j, n_max)
        sim = np.array([s.amplitude(j) for s in states])
        err = max(err, float(np.max(np.abs(amps - sim))))
    return err


def cmd_verify(cfg: RunConfig) -> tuple[str, bool]:
    coins = cfg.coins
    if cfg.perturb:
        p = coins.plus
        coins = replace(coins, plus=CoinMatrix(p.a + cfg.perturb, p.b, p.c, p.d, check=False))
    state = cfg.coin_state
    rng = np.random.default_rng(cfg.seed)
    extra = [CoinSet(_random_coin(rng), _random_coin(rng), _random_coin(rng)) for _ in range(4)]
    checks = [_check("coin_unitarity", coins.unitarity_error(), core.UNITARITY_TOL)]

    drift, prev = 0.0, core.initial_state(state)
    for _ in range(200):
        nxt = core.unitary_step(prev, coins)
        drift = max(drift, abs(nxt.norm2() - prev.norm2()))
        prev = nxt
    checks.append(_check("evolution_unitarity", drift, 1e-12))

    amp_err, ret_err = 0.0, 0.0
    for cs in [coins, *extra]:
        a, r = _oracle_error(state, cs, 14)
        amp_err, ret_err = max(amp_err, a), max(ret_err, r)
    checks.append(_check("path_oracle_equivalence", amp_err, 1e-12))
    checks.append(_check("path_oracle_first_return", ret_err, 1e-12))

    if coins.plus.is_mixing and coins.minus.is_mixing:
        sites = [*range(1, 11), *range(-10, 0)]
        checks.append(_check("genfunc_equivalence", _genfunc_error(state, coins, 50, sites), 1e-6))

    grid = (0.3, 0.5, 1 / math.sqrt(2), math.cos(math.pi / 8), 0.95)
    n_err = max(
        abs(asymptotics.konno_integral(lambda x: 4 * x * x / (1 + x), a, 0.0, a) - asymptotics.normalization_N(a))
        for a in grid
    )
    checks.append(_check("normalization_quadrature", n_err, 1e-10))

    record = observables.survival_series(state, coins, 500)
    checks.append(
        _check("complementarity", float(np.max(np.abs(record.absorption + record.survival - 1.0))), 1e-12)
    )
    mass_err = 0.0
    for n in (1, 2, 10, 100):
        mass_err = max(mass_err, abs(observables.conditional_distribution(state, coins, n).mass - 1.0))
    checks.append(_check("conditional_mass", mass_err, 1e-10))

    text = "".join(json.dumps(c, sort_keys=False) + "\n" for c in checks)
    return text, all(c["pass"] for c in checks)


# -- argument parsing --------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--coin", default="hadamard", help="coin for every site (hadamard | rot:<angle> | raw:<numbers>)")
    common.add_argument("--coin-minus", dest="coin_minus", help="coin for j < 0")
    common.add_argument("--coin-zero", dest="coin_zero", help="coin at the origin")
    common.add_argument("--coin-plus", dest="coin_plus", help="coin for j > 0")
    common.add_argument("--state", default="1,0", help="initial coin state re,im or re,im,re,im")
    common.add_argument("--out", help="output file (written atomically); stdout if omitted")

    parser = argparse.ArgumentParser(prog="qwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="conditional distribution and CDFs after n steps")
    p.add_argument("--steps", type=int, default=100)

    p = sub.add_parser("polya", parents=[common], help="recurrence probability: closed form vs series")
    p.add_argument("--steps", type=int, default=2000, help="series truncation n_max")
    p.add_argument("--amin", "--a-minus", dest="amin", help="use a rotation coin with |a| = value for j < 0")
    p.add_argument("--aplus", "--a-plus", dest="aplus", help="use a rotation coin with |a| = value for j > 0")

    p = sub.add_parser("verify", parents=[common], help="cross-check simulator, path oracle and generating functions")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="seed for the random coin sets")
    p.add_argument("--perturb", type=float, default=0.0, help="add this to a_+ (fault injection)")

    p = sub.add_parser("converge", parents=[common], help="Kolmogorov distance and survival gap over a ladder")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--ladder", help="comma-separated step counts")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"qwalk: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "simulate":
            write_output(cmd_simulate(cfg), cfg.out)
        elif args.command == "polya":
            write_output(cmd_polya(cfg), cfg.out)
        elif args.command == "converge":
            write_output(cmd_converge(cfg), cfg.out)
        elif args.command == "verify":
            text, ok = cmd_verify(cfg)
            write_output(text, cfg.out)
            return EXIT_OK if ok else EXIT_FAIL
    except NonMixingCoinError as exc:
        print(f"qwalk: error: {exc}", file=sys.stderr)
        return EXIT_NONMIXING
    except QWalkError as exc:
        print(f"qwalk: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
