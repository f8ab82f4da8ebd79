"""``entgroups`` command line.

Every subcommand writes one canonical JSON document (sorted keys, floats at
17 significant digits) to stdout or to ``--json PATH``. Exit status is 0 on
success, 2 on invalid input and 3 when an internal verification fails.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__, errors
from ._jsonio import dumps_canonical
from .dmalgebra import dm_report
from .entclass import fingerprint, same_entanglement_type
from .estimators import StabilizerAnalyzer
from .goursat import closure, goursat_check, load_group_spec
from .schmidt import DEGENERACY_RTOL, RANK_RTOL, schmidt_report
from .stabilizer import CHECK_TOL, DEFAULT_RTOL, SearchBudget
from .statecore import NAMED_STATES, named_state, random_state, read_state, state_to_dict
from .tasks import (chsh_closed_form, chsh_value, cnot_equivalence_check, entanglement_swap,
                    make_simon_instance, simon_run, simon_stabilizer_check, superdense_gram,
                    superdense_success, swap_stabilizer_eigenvalues, teleport_table)
from .validation import check_dims, check_partition, check_rng, check_tolerance

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one-line diagnostic, same exit code as other validation failures
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def parse_params(text):
    """``"a=0.8,b=0.6"`` to ``{"a": "0.8", "b": "0.6"}``; values are parsed downstream."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise errors.ValidationError(f"bad parameter {item!r}; expected k=v")
        out[key.strip()] = value.strip()
    return out


def _number(text):
    try:
        v = complex(str(text).replace(" ", ""))
    except ValueError:
        raise errors.ValidationError(f"not a number: {text!r}") from None
    return v.real if v.imag == 0 else v


def _load_state(args):
    chosen = [x is not None for x in (args.state, args.named, args.random)]
    if sum(chosen) != 1:
        raise errors.ValidationError("give exactly one of --state, --named, --random")
    if args.state is not None:
        try:
            state = read_state(args.state)
        except (OSError, json.JSONDecodeError) as exc:
            raise errors.ValidationError(f"cannot read state file: {exc}") from None
        return state, {"file": args.state}
    if args.named is not None:
        params = parse_params(args.params)
        return named_state(args.named, params), {"named": args.named, "params": params}
    dims = check_dims(args.random.replace("x", ",").split(","))
    if args.seed is None:
        raise errors.ValidationError("--random needs --seed")
    return random_state(dims, check_rng(args.seed)), {"random": list(dims), "seed": args.seed}


def _tolerances(args):
    return {"stabilizer_rtol": args.tol, "check_tol": CHECK_TOL,
            "schmidt_rank_rtol": RANK_RTOL, "degeneracy_rtol": DEGENERACY_RTOL}


def _envelope(command, args, result, source=None):
    out = {"command": command, "version": __version__, "tolerances": _tolerances(args),
           "result": result}
    if source is not None:
        out["input"] = source
    return out


# ---------------------------------------------------------------- commands

def cmd_analyze(args):
    state, source = _load_state(args)
    est = StabilizerAnalyzer(args.partition, args.tol, args.discrete_search,
                             args.max_candidates).fit(state)
    rep = est.report()
    for key, (left, right) in rep["isomorphism"].items():
        if left != right:
            raise errors.CheckFailed(f"isomorphism dimensions differ on {key}: {left} vs {right}")
    for r in est.no_sharing_:
        if not r.passed:
            raise errors.CheckFailed(f"no-sharing check failed for {r.to_dict()}")
    fp = fingerprint(state, tol=args.tol, discrete=args.discrete_search,
                     budget=SearchBudget(max_candidates=args.max_candidates))
    rep["fingerprint_digest"] = fp.digest()
    rep["dims"] = list(state.dims)
    return _envelope("analyze", args, rep, source)


def cmd_schmidt(args):
    state, source = _load_state(args)
    default = "1|" + ",".join(str(i) for i in range(2, state.n_factors + 1))
    part = check_partition(args.partition or default, state.n_factors)
    if part.n_blocks != 2:
        raise errors.InvalidPartitionError("schmidt needs a two-block partition")
    rep = schmidt_report(state, part.blocks[0])
    rep["partition"] = part.format()
    return _envelope("schmidt", args, rep, source)


def cmd_classify(args):
    state, source = _load_state(args)
    fp = fingerprint(state, args.max_blocks, args.tol, discrete=not args.no_discrete)
    return _envelope("classify", args, {"fingerprint": fp.to_dict(), "digest": fp.digest()},
                     source)


def cmd_compare(args):
    s1, src1 = _load_state(args)
    other = argparse.Namespace(state=args.other_state, named=args.other_named,
                               params=args.other_params, random=args.other_random,
                               seed=args.other_seed)
    s2, src2 = _load_state(other)
    kw = {"max_blocks": args.max_blocks, "tol": args.tol, "discrete": not args.no_discrete}
    same = same_entanglement_type(s1, s2, permute=args.permute, **kw)
    res = {"same_type": same, "digests": [fingerprint(s1, **kw).digest(),
                                          fingerprint(s2, **kw).digest()]}
    return _envelope("compare", args, res, {"first": src1, "second": src2})


def cmd_goursat(args):
    try:
        with open(args.spec) as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise errors.ValidationError(f"cannot read group spec: {exc}") from None
    group, gens = load_group_spec(spec)
    G = closure(group, gens)
    rep = goursat_check(G, args.mode)
    if not rep.passed:
        raise errors.CheckFailed(f"Goursat verification failed: {rep.to_dict()}")
    return _envelope("goursat", args, rep.to_dict(), {"spec": args.spec})


def cmd_dmalgebra(args):
    state, source = _load_state(args)
    rep = dm_report(state, args.partition, args.tol)
    if rep["stabilizer_commutation_residual"] > CHECK_TOL:
        raise errors.CheckFailed("a stabilizer generator does not commute with the algebra")
    return _envelope("dmalgebra", args, rep, source)


def cmd_named(args):
    if args.named is None:
        return _envelope("named", args, {"names": sorted(NAMED_STATES)})
    state, source = _load_state(args)
    return _envelope("named", args, state_to_dict(state), source)


def _linspace(text):
    try:
        lo, hi, num = text.split(":")
        return np.linspace(float(lo), float(hi), int(num))
    except ValueError:
        raise errors.ValidationError(f"sweep must be start:stop:num, got {text!r}") from None


def _write_tsv(path, header, rows):
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(format(float(v), ".17g") for v in row) + "\n")


def task_superdense(args):
    a = float(args.a)
    b = float(np.sqrt(max(0.0, 1 - a * a))) if args.b is None else float(args.b)
    gram = superdense_gram(a, b)
    res = {"a": a, "b": b, "success": superdense_success(a, b),
           "closed_form": (1 + 2 * a * b) / 2, "gram": gram}
    if args.sweep:
        bs = _linspace(args.sweep)
        rows = [(x, superdense_success(np.sqrt(1 - x * x), x)) for x in bs]
        res["sweep"] = [list(r) for r in rows]
        if args.tsv:
            _write_tsv(args.tsv, ["b", "success"], rows)
    return res


def task_teleport(args):
    a = _number(args.a)
    b = float(np.sqrt(max(0.0, 1 - abs(a) ** 2))) if args.b is None else _number(args.b)
    pair = tuple(int(c) for c in args.pair)
    return {"a": a, "b": b, "table": teleport_table(a, b, pair), "cnot_residual": cnot_equivalence_check(a, b)}


def task_swap(args):
    return {"coefficients": entanglement_swap(), "stabilizers": swap_stabilizer_eigenvalues()}


def task_chsh(args):
    p1 = float(args.p1)
    p2 = float(args.p2) if args.p2 is not None else float(np.sqrt(max(0.0, 1 - p1 * p1)))
    res = {"p1": p1, "p2": p2, "eps": args.eps, "value": chsh_value(p1, p2, args.eps),
           "closed_form": chsh_closed_form(p1, p2, args.eps)}
    res["violates"] = res["value"] > 2
    if args.sweep:
        rows = [(e, chsh_value(p1, p2, e)) for e in _linspace(args.sweep)]
        res["sweep"] = [list(r) for r in rows]
        if args.tsv:
            _write_tsv(args.tsv, ["eps", "value"], rows)
    return res


def task_simon(args):
    seed = 0 if args.seed is None else args.seed
    inst = make_simon_instance(args.n, args.xi, seed=seed)
    rng = check_rng(seed)
    runs = [simon_run(inst, rng=rng) for _ in range(args.runs)]
    ok = all(r["xi"] == inst.xi for r in runs)
    if not ok:
        raise errors.CheckFailed("recovered xi does not match the instance")
    return {"n": inst.n, "xi": runs[0]["xi_bits"], "seed": seed, "runs": args.runs,
            "repetitions": [r["repetitions"] for r in runs],
            "samples": [r["samples"] for r in runs],
            "stabilizer_check": simon_stabilizer_check(0, inst.xi, inst.n)}


TASKS = {"superdense": task_superdense, "teleport": task_teleport, "swap": task_swap,
         "chsh": task_chsh, "simon": task_simon}


def cmd_task(args):
    return _envelope("task", args, {"task": args.task, **TASKS[args.task](args)})


# ---------------------------------------------------------------- parser

def _state_flags(p, prefix=""):
    dest = prefix.replace("-", "_")
    p.add_argument(f"--{prefix}state", dest=f"{dest}state", metavar="FILE", help="JSON state file")
    p.add_argument(f"--{prefix}named", dest=f"{dest}named", metavar="NAME", help="named state")
    p.add_argument(f"--{prefix}params", dest=f"{dest}params", metavar="K=V,...",
                   help="parameters of the named state")
    p.add_argument(f"--{prefix}random", dest=f"{dest}random", metavar="DIMS",
                   help="Haar-random state with dims such as 2,2,2 (needs a seed)")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_RTOL,
                        help=f"relative nullspace threshold (default {DEFAULT_RTOL})")
    common.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="random seed")

    parser = _Parser(prog="entgroups", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"entgroups {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="stabilizer algebra report")
    _state_flags(p)
    p.add_argument("--partition", help='blocks such as "1,2|3" (default: singletons)')
    p.add_argument("--discrete-search", action="store_true", help="search discrete stabilizers")
    p.add_argument("--max-candidates", type=int, default=200_000)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("schmidt", parents=[common], help="bipartite Schmidt data")
    _state_flags(p)
    p.add_argument("--partition", help='two blocks such as "1|2,3"')
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("classify", parents=[common], help="entanglement-type fingerprint")
    _state_flags(p)
    p.add_argument("--max-blocks", type=int, default=None)
    p.add_argument("--no-discrete", action="store_true", help="skip the discrete search")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("compare", parents=[common], help="compare two fingerprints")
    _state_flags(p)
    _state_flags(p, "other-")
    p.add_argument("--other-seed", type=int, default=None)
    p.add_argument("--max-blocks", type=int, default=None)
    p.add_argument("--no-discrete", action="store_true")
    p.add_argument("--permute", action="store_true", help="allow relabelling the factors")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("goursat", parents=[common], help="Goursat check of a finite subgroup")
    p.add_argument("--spec", required=True, metavar="FILE")
    p.add_argument("--mode", choices=["symmetric", "asymmetric"], default="symmetric")
    p.set_defaults(func=cmd_goursat)

    p = sub.add_parser("dmalgebra", parents=[common], help="density-matrix Lie algebra")
    _state_flags(p)
    p.add_argument("--partition")
    p.set_defaults(func=cmd_dmalgebra)

    p = sub.add_parser("named", parents=[common], help="list or emit named states")
    _state_flags(p)
    p.set_defaults(func=cmd_named)

    p = sub.add_parser("task", parents=[common], help="quantum task demonstrations")
    p.add_argument("task", choices=sorted(TASKS))
    p.add_argument("--a", default="0.7071067811865476", help="first amplitude")
    p.add_argument("--b", default=None, help="second amplitude")
    p.add_argument("--pair", default="13", choices=["13", "12"], help="measured qubits")
    p.add_argument("--p1", type=float, default=0.7071067811865476)
    p.add_argument("--p2", type=float, default=None)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--sweep", metavar="START:STOP:NUM", help="parameter sweep")
    p.add_argument("--tsv", metavar="PATH", help="write the sweep as TSV")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--xi", default="101")
    p.add_argument("--runs", type=int, default=1)
    p.set_defaults(func=cmd_task)
    return parser


def run(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if hasattr(args, "tol"):
            check_tolerance(args.tol)
        report = args.func(args)
    except errors.CheckFailed as exc:
        stderr.write(f"entgroups: check failed: {_one_line(exc)}\n")
        return EXIT_CHECK
    except (errors.ValidationError, ValueError, TypeError) as exc:
        stderr.write(f"entgroups: invalid input: {_one_line(exc)}\n")
        return EXIT_INVALID
    text = dumps_canonical(report) + "\n"
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def _one_line(exc):
    return " ".join(str(exc).split()) or type(exc).__name__


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
