"""``qwalk`` command line: spectrum, evolve, average, search, classify, verify.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
Floats are written as shortest round-trip decimals with an uppercase exponent,
so identical runs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import enum
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import graphs, mixing, numtheory, verify, walk

COMMANDS = ("spectrum", "evolve", "average", "search", "classify", "verify")


class UsageError(ValueError):
    pass


def fmt_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    return repr(x).replace("e", "E")


def to_json(obj) -> str:
    """Deterministic JSON: insertion key order, floats via ``fmt_float``, complex as [re, im]."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return {None: "null", True: "true", False: "false"}[None if obj is None else bool(obj)]
    if isinstance(obj, enum.Enum):
        return to_json(obj.value)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    if isinstance(v, enum.Enum):
        return str(v.value)
    return str(v)


def to_csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


@dataclass
class RunConfig:
    command: str
    graph: dict
    t: float | None = None
    t_max: float | None = None
    grid: int | None = None
    refine: int = 40
    output_format: str = "json"
    tol: float | None = None
    collision_tol: float = graphs.COLLISION_TOL
    tv_convention: str = "paper"
    seed: int = 0
    scale: float = 1.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output_format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.tv_convention not in ("paper", "half"):
            raise UsageError(f"unknown TV convention {self.tv_convention!r}")
        for name in ("t", "t_max", "tol", "collision_tol", "scale"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise UsageError(f"--{name.replace('_', '-')} must be finite")
        if self.tol is not None and self.tol <= 0:
            raise UsageError("--tol must be positive")
        if self.collision_tol <= 0:
            raise UsageError("--collision-tol must be positive")
        if self.t_max is not None and self.t_max <= 0:
            raise UsageError("--t-max must be positive")
        if self.grid is not None and self.grid < 2:
            raise UsageError("--grid must be >= 2")
        if self.refine < 0:
            raise UsageError("--refine must be >= 0")


def read_graph_arg(arg: str, stdin=None) -> dict:
    """Inline JSON, a file path, or '-' for stdin."""
    if arg == "-":
        text = (stdin or sys.stdin).read()
    elif arg.lstrip().startswith("{"):
        text = arg
    else:
        path = Path(arg)
        if not path.is_file():
            raise UsageError(f"graph spec {arg!r} is neither JSON nor a readable file")
        text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise UsageError("graph spec must be a JSON object")
    return obj


def _tv(value: float, cfg: RunConfig) -> float:
    return value / 2 if cfg.tv_convention == "half" else value


def cmd_spectrum(cfg: RunConfig) -> tuple[str, int]:
    spec = graphs.graph_from_dict(cfg.graph)
    sp = graphs.spectrum(spec, cfg.collision_tol)
    witness = graphs.repeated_eigenvalue_witness(spec, cfg.collision_tol)
    if cfg.output_format == "csv":
        rows = [(sp.index(i), float(lam), int(sp.labels[i])) for i, lam in enumerate(sp.eigenvalues)]
        return to_csv(["index", "eigenvalue", "class"], rows), 0
    report = {
        "graph": cfg.graph,
        "order": sp.order,
        "eigenvalues": [float(v) for v in sp.eigenvalues],
        "collision_classes": sp.collision_classes,
        "distinct_count": sp.distinct_count,
        "witness": None if witness is None else list(witness),
    }
    return to_json(report) + "\n", 0


def cmd_evolve(cfg: RunConfig) -> tuple[str, int]:
    spec = graphs.graph_from_dict(cfg.graph)
    n = spec.order
    if cfg.t is not None:
        amps = walk.evolve(spec, cfg.t, scale=cfg.scale).amps
        probs = np.abs(amps) ** 2
        tv = _tv(mixing.tv_to_uniform(probs), cfg)
        if cfg.output_format == "csv":
            rows = [(spec.index(j), amps[j].real, amps[j].imag, probs[j]) for j in range(n)]
            return to_csv(["vertex", "re", "im", "probability"], rows), 0
        report = {"t": cfg.t, "amplitudes": list(amps), "probabilities": list(probs), "tv_to_uniform": tv}
        return to_json(report) + "\n", 0
    if cfg.t_max is None:
        raise UsageError("evolve needs --t or --t-max")
    grid = cfg.grid or 101
    times = np.linspace(0.0, cfg.t_max, grid)
    probs = walk.probabilities_batch(spec, times, scale=cfg.scale)
    tvs = [_tv(v, cfg) for v in np.abs(probs - 1.0 / n).sum(axis=1)]
    if cfg.output_format == "csv":
        header = ["t"] + [f"p_{j}" for j in range(n)] + ["tv_to_uniform"]
        rows = [[t, *row, tv] for t, row, tv in zip(times, probs, tvs)]
        return to_csv(header, rows), 0
    report = {"times": list(times), "probabilities": [list(r) for r in probs], "tv_to_uniform": tvs}
    return to_json(report) + "\n", 0


def cmd_average(cfg: RunConfig) -> tuple[str, int]:
    spec = graphs.graph_from_dict(cfg.graph)
    avg = mixing.average_distribution(spec, cfg.collision_tol)
    if cfg.output_format == "csv":
        return to_csv(["vertex", "probability"], [(spec.index(j), p) for j, p in enumerate(avg.probs)]), 0
    tol = 1e-9 if cfg.tol is None else cfg.tol
    tv = mixing.tv_to_uniform(avg)
    report = {
        "probabilities": list(avg.probs),
        "collision_pair_count": avg.collision_pair_count,
        "tv_to_uniform": _tv(tv, cfg),
        "tv_convention": cfg.tv_convention,
        "ds_bound": mixing.ds_bound(avg, spec.factors),
        "average_uniform": tv <= tol,
        "tol": tol,
    }
    return to_json(report) + "\n", 0


def cmd_search(cfg: RunConfig) -> tuple[str, int]:
    spec = graphs.graph_from_dict(cfg.graph)
    if cfg.t_max is None:
        raise UsageError("search needs --t-max")
    res = mixing.search_min_tv(spec, cfg.t_max, cfg.grid, cfg.refine, scale=cfg.scale)
    report = {
        "t_star": res.t_star,
        "tv_star": _tv(res.tv_star, cfg),
        "grid_points": res.grid_points,
        "refinement_iterations": res.refinement_iterations,
        "tv_convention": cfg.tv_convention,
    }
    if cfg.output_format == "csv":
        return to_csv(list(report), [list(report.values())]), 0
    return to_json(report) + "\n", 0


def cmd_classify(cfg: RunConfig) -> tuple[str, int]:
    if cfg.graph.get("type") != "cycle" or "n" not in cfg.graph:
        raise UsageError('classify needs a cycle graph, e.g. {"type":"cycle","n":12}')
    n = cfg.graph["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise UsageError("cycle length must be an integer")
    v = numtheory.classify_cycle(n)
    if cfg.output_format == "csv":
        size = "" if v.certificate is None else len(v.certificate)
        return to_csv(["n", "u", "q", "verdict", "certificate_size"], [(v.n, v.u, v.q, v.verdict, size)]), 0
    return to_json(v.to_dict()) + "\n", 0


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    tol = verify.IDENTITY_TOL if cfg.tol is None else cfg.tol
    checks = verify.run_suite(cfg.graph, seed=cfg.seed, tol=tol)
    ok = all(c.passed for c in checks)
    if cfg.output_format == "csv":
        rows = [(c.family, c.name, "pass" if c.passed else "FAIL", c.max_residual, c.tolerance, c.cases) for c in checks]
        text = to_csv(["family", "check", "status", "max_residual", "tolerance", "cases"], rows)
    else:
        text = to_json({"passed": ok, "checks": [c.to_dict() for c in checks]}) + "\n"
    return text, 0 if ok else 1


HANDLERS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "average": cmd_average,
    "search": cmd_search,
    "classify": cmd_classify,
    "verify": cmd_verify,
}


def run(cfg: RunConfig) -> tuple[str, int]:
    return HANDLERS[cfg.command](cfg)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwalk", description="Continuous-time quantum walks on circulant graphs.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--graph", required=True, help="inline JSON graph object, a file path, or '-' for stdin")
    p.add_argument("--t", type=float, help="single evaluation time")
    p.add_argument("--t-max", type=float, help="end of the time range [0, t_max]")
    p.add_argument("--grid", type=int, help="number of grid points over [0, t_max]")
    p.add_argument("--refine", type=int, default=40, help="golden-section iterations (search)")
    p.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    p.add_argument("--tol", type=float, help="decision tolerance (average uniformity, verify residuals)")
    p.add_argument("--collision-tol", type=float, default=graphs.COLLISION_TOL,
                   help="absolute tolerance for equal eigenvalues")
    p.add_argument("--tv-convention", choices=("paper", "half"), default="paper",
                   help="paper: sum |P-Q|; half: the halved convention")
    p.add_argument("--scale", type=float, default=1.0,
                   help="Hamiltonian scale s in exp(-i s t A); 1/degree gives degree-normalized time")
    p.add_argument("--seed", type=int, default=0, help="seed for verify's random times")
    return p


def main(argv=None, stdout=None, stderr=None, stdin=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        graph = read_graph_arg(args.graph, stdin)
        cfg = RunConfig(
            command=args.command,
            graph=graph,
            t=args.t,
            t_max=args.t_max,
            grid=args.grid,
            refine=args.refine,
            output_format=args.output_format,
            tol=args.tol,
            collision_tol=args.collision_tol,
            tv_convention=args.tv_convention,
            seed=args.seed,
            scale=args.scale,
        )
        text, code = run(cfg)
    except (ValueError, graphs.ResourceLimitError) as exc:
        print(f"qwalk: error: {exc}", file=stderr)
        return 2
    stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
