"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 computation error
(disconnected graph, infeasible placement, unreachable origin, no fusion
agreement, inconsistent fusion inputs).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import fusion, gossip, multicast, prefix, tree
from .errors import ComputationError, InputError
from .report import graph_plan_dot, parse_number, prefix_plan_dot, to_json, to_text

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_COMPUTE = 0, 1, 2, 3
DEFAULT_SEED = 0
DEFAULT_TRIALS = 100_000

FUSION_RULES = {
    "m": "hull of all points covered by at least n-f intervals",
    "omega": "overlap count profile; peak = regions of maximal overlap",
    "n": "maximal regions where the overlap count is in [n-f, n]",
    "s": "[(f+1)-th largest left end, (f+1)-th smallest right end]",
}


class PartialFailure(ComputationError):
    """Some requested results failed; ``report`` still holds the rest."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _profile(raw) -> prefix.ImportanceProfile:
    if isinstance(raw, dict):
        items = raw.items()
    elif isinstance(raw, list) and all(isinstance(e, (int, float, str)) for e in raw):
        items = list(enumerate(raw))
    elif isinstance(raw, list):
        items = [(e["id"], e["p"]) if isinstance(e, dict) else tuple(e) for e in raw]
    else:
        raise InputError("profile must be an object {id: p}, a list of [id, p], or a list of p")
    return prefix.ImportanceProfile(tuple((leader, parse_number(p)) for leader, p in items))


# --- subcommands ----------------------------------------------------------


def cmd_tree_stats(data, args):
    t = tree.DaryTree(int(data["D"]), int(data["n_max"]))
    counts = {}
    for entry in data.get("leaders", []):
        depth, count = int(entry["depth"]), int(entry["count"])
        if depth in counts:
            raise InputError(f"depth {depth} listed twice")
        counts[depth] = count
    profile = tree.LeaderCountProfile(counts)
    profile.validate(t)

    levels = []
    for depth, s in sorted(counts.items()):
        levels.append({
            "depth": depth,
            "count": s,
            "nodes_at_depth": tree.nodes_at_depth(t, depth),
            "t_j": tree.local_leader_fraction(s, t, depth),
            "p_leader_at_level": tree.p_leader_at_level(s, t, depth, args.mode),
            "p_leader_paper": tree.p_leader_at_level(s, t, depth, "paper"),
            "p_leader_exact": tree.p_leader_at_level(s, t, depth, "exact"),
        })
    report = {
        "command": "tree-stats",
        "D": t.arity,
        "n_max": t.max_depth,
        "mode": args.mode,
        "node_count": tree.node_count(t),
        "denominator": {m: tree.denominator(t, m) for m in tree.MODES},
        "levels": levels,
        "p_any_local_leader": tree.p_any_local_leader(profile, t, args.mode),
        "p_any_local_leader_paper": tree.p_any_local_leader(profile, t, "paper"),
        "p_any_local_leader_exact": tree.p_any_local_leader(profile, t, "exact"),
    }
    if data.get("q") is not None:
        link = tree.LinkModel(parse_number(data["q"]))
        report["reliability"] = {
            "q": link.q,
            "trials": args.trials,
            "seed": args.seed,
            "rows": tree.reliability_table(link, max(t.max_depth, 1), args.trials, args.seed),
        }
    if args.figure:
        from .plotting import tree_stats_figure

        tree_stats_figure(report, args.figure)
    return report, None


def cmd_plan_tree(data, args):
    D = int(data.get("D", 2))
    profile = _profile(data["profile"])
    assignment = prefix.optimal_depths(profile, D)
    plan = prefix.assign_paths(assignment)
    report = {
        "command": "plan-tree",
        "D": D,
        "leaders": [
            {
                "id": leader,
                "importance": p,
                "depth": assignment.as_dict()[leader],
                "path": prefix.render_path(plan.paths[leader], D),
            }
            for leader, p in profile.entries
        ],
        "expected_depth": prefix.expected_depth(assignment, profile),
        "entropy_bound": prefix.entropy_base_D(profile, D),
        "kraft_sum": prefix.kraft_sum(assignment),
        "prefix_free": prefix.verify_prefix_free(plan),
        "secure": prefix.security_check(plan),
    }
    if args.figure:
        from .plotting import plan_tree_figure

        plan_tree_figure(plan, args.figure)
    return report, lambda: prefix_plan_dot(plan)


def _graph(data) -> multicast.WeightedGraph:
    vertices = tuple(data["vertices"])
    edges = []
    for e in data["edges"]:
        u, v, w = e
        w = parse_number(w)
        edges.append((u, v, int(w) if w.denominator == 1 else float(w)))
    return multicast.WeightedGraph(vertices, tuple(edges))


def cmd_plan_graph(data, args):
    graph = _graph(data)
    root = data["root"]
    profile = _profile(data["profile"])
    if root not in graph.vertices:
        raise InputError(f"root {root!r} is not a vertex")
    mst = multicast.minimum_spanning_tree(graph)
    rooted = multicast.root_tree(mst, root)
    embedded = multicast.embed_binary_tree(rooted, graph)
    plan = multicast.plan_doubly_optimal(graph, root, profile)
    report = {
        "command": "plan-graph",
        "root": root,
        "mst": {"edges": [list(e) for e in plan.mst_edges], "weight": plan.mst_weight},
        "embedded_tree": {str(v): list(kids) for v, kids in embedded.children.items()},
        "uncovered": sorted(embedded.uncovered, key=str),
        "leaders": [
            {
                "id": leader,
                "importance": p,
                "vertex": plan.paths[leader][-1],
                "depth": len(plan.paths[leader]) - 1,
                "path": list(plan.paths[leader]),
            }
            for leader, p in profile.entries
        ],
        "realized_expected_depth": plan.realized_expected_depth,
        "ideal_expected_depth": plan.ideal_expected_depth,
        "verified": multicast.verify_plan(plan, graph),
    }
    if args.figure:
        from .plotting import plan_graph_figure

        plan_graph_figure(plan, embedded, args.figure)
    return report, lambda: graph_plan_dot(graph, plan, embedded.children)


def _field(data) -> gossip.Field:
    raw = data["nodes"]
    if isinstance(raw, dict):
        nodes = {k: tuple(v) for k, v in raw.items()}
    else:
        nodes = {e["id"]: (e["x"], e["y"]) for e in raw}
    return gossip.Field(nodes, tuple(data["base_station"]), float(data["radius"]))


def cmd_gossip(data, args):
    field = _field(data)
    config = gossip.GossipConfig(tuple(float(p) for p in data["probabilities"]))
    origin = data["origin"]
    K = int(data.get("sectors", 1))
    leveling = gossip.assign_levels(field)
    sectoring = gossip.assign_sectors(field, K)
    sim = gossip.simulate_gossip(
        field, leveling, config, origin, args.trials, args.seed,
        keep_traces=args.trace_trials if args.trace else 0,
    )
    report = {
        "command": "gossip",
        "origin": origin,
        "origin_level": leveling.level[origin],
        "probabilities": list(config.probabilities),
        "trials": sim.trials,
        "seed": sim.seed,
        "delivery": sim.delivery,
        "mean_transmissions": sim.mean_transmissions,
        "sectors": K,
        "localization": [
            {"id": v, "level": leveling.level[v], "sector": sectoring.sector[v]}
            for v in field.ids if v in leveling.level
        ],
        "unreachable": sorted(leveling.unreachable),
    }
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(gossip.format_trace(sim.traces))
    if args.figure:
        from .plotting import gossip_figure

        gossip_figure(field, leveling, sectoring, args.figure)
    return report, None


def _interval_json(iv):
    return [_num(iv.lo), _num(iv.hi)]


def _num(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def cmd_fuse(data, args):
    intervals = tuple(fusion.Interval(*pair) for pair in data["intervals"])
    problem = fusion.FusionProblem(intervals, int(data["f"]))
    selected = list(FUSION_RULES) if args.function == "all" else [args.function]
    profile = fusion.omega_function(problem)
    results, outputs, failed = {}, {}, False
    for name in selected:
        entry = {"rule": FUSION_RULES[name]}
        try:
            if name == "m":
                out = [fusion.m_function(problem)]
            elif name == "s":
                out = [fusion.s_function(problem)]
            elif name == "n":
                out = fusion.n_function(problem)
            else:
                out = fusion.peak_regions(problem)
        except ComputationError as exc:
            entry["error"] = type(exc).__name__
            entry["message"] = str(exc)
            failed = True
        else:
            outputs[name] = out
            if name in ("m", "s"):
                entry["interval"] = _interval_json(out[0])
            else:
                entry["regions"] = [_interval_json(iv) for iv in out]
        results[name] = entry

    report = {
        "command": "fuse",
        "n": problem.n,
        "f": problem.f,
        "threshold": problem.threshold,
        "results": results,
        "overlap_profile": [
            {"lo": _num(lo), "hi": _num(hi), "count": c} for lo, hi, c in profile.regions()
        ],
    }
    lip = data.get("lipschitz")
    if lip:
        eps = parse_number(lip["eps"])
        probes = int(lip.get("probes", 100))
        report["lipschitz"] = {
            "eps": float(eps),
            "probes": probes,
            "seed": args.seed,
            "max_displacement": {
                name: fusion.lipschitz_probe(name, problem, eps, probes, args.seed, skip_undefined=True)
                for name in selected if name in outputs
            },
        }
    if args.figure:
        from .plotting import fusion_figure

        fusion_figure(problem, profile, outputs, args.figure)
    if failed:
        raise PartialFailure(
            "; ".join(f"{k}: {v['error']}" for k, v in results.items() if "error" in v), report
        )
    return report, None


COMMANDS = {
    "tree-stats": (cmd_tree_stats, "leader probabilities and link reliability of a D-ary tree"),
    "plan-tree": (cmd_plan_tree, "optimal prefix-free leader paths for an importance profile"),
    "plan-graph": (cmd_plan_graph, "MST-embedded secure multicast plan for a weighted graph"),
    "gossip": (cmd_gossip, "level-controlled gossip simulation and localization table"),
    "fuse": (cmd_fuse, "fault-tolerant interval fusion (M, Omega, N, S)"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hhcn", description="Secure multicast planning toolkit for hierarchical networks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--input", "-i", required=True, metavar="FILE", help="JSON input file")
        p.add_argument("--format", choices=("json", "dot", "text"), default="json",
                       help="output format (default: json; dot only for plan-tree/plan-graph)")
        p.add_argument("--output", "-o", metavar="FILE", help="write the report here instead of stdout")
        p.add_argument("--figure", metavar="FILE", help="also render a matplotlib figure to FILE")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default: 0)")
        p.add_argument("--trials", type=_non_negative, default=DEFAULT_TRIALS,
                       help="Monte Carlo trials (default: 100000)")
        if name == "tree-stats":
            p.add_argument("--mode", choices=tree.MODES, default="paper",
                           help="leader-probability denominator (default: paper)")
        if name == "fuse":
            p.add_argument("--function", choices=("m", "omega", "n", "s", "all"), default="all",
                           help="fusion function (default: all)")
        if name == "gossip":
            p.add_argument("--trace", metavar="FILE", help="write forwarding traces as text lines")
            p.add_argument("--trace-trials", type=_non_negative, default=100,
                           help="number of trials to trace (default: 100)")
    return parser


def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    if args.format == "dot" and args.command not in ("plan-tree", "plan-graph"):
        print(f"hhcn {args.command}: error: --format dot is only available for plan-tree and plan-graph",
              file=stderr)
        return EXIT_USAGE
    if args.command == "gossip" and args.trials < 1:
        print("hhcn gossip: error: --trials must be >= 1", file=stderr)
        return EXIT_USAGE

    pending = None
    try:
        data = _load(args.input)
        if not isinstance(data, dict):
            raise InputError("top-level JSON value must be an object")
        report, dot = handler(data, args)
    except PartialFailure as exc:
        report, dot, pending = exc.report, None, exc
    except InputError as exc:
        print(f"hhcn {args.command}: invalid input: {exc}", file=stderr)
        return EXIT_INPUT
    except (KeyError, TypeError, ValueError) as exc:
        print(f"hhcn {args.command}: invalid input: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INPUT
    except ComputationError as exc:
        print(f"hhcn {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_COMPUTE

    if args.format == "dot":
        text = dot()
    elif args.format == "text":
        text = to_text(report)
    else:
        text = to_json(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if pending is not None:
        print(f"hhcn {args.command}: {pending}", file=stderr)
        return EXIT_COMPUTE
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))

