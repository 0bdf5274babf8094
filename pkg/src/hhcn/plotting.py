"""Matplotlib figures written next to the CLI reports."""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.5,
    "savefig.dpi": 120,
}

LEADER_COLOR = "tab:blue"
NODE_COLOR = "0.75"


def figure(width=6.0, height=None, ncols=1):
    golden = (math.sqrt(5) - 1.0) / 2.0
    with plt.rc_context(STYLE):
        return plt.subplots(1, ncols, figsize=(width, height or width * golden), squeeze=False)


def save(fig, path):
    with plt.rc_context(STYLE):
        fig.tight_layout()
        # no timestamp/version metadata, so repeated runs give identical files
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def tree_stats_figure(report, path):
    fig, axes = figure(9.0, 3.6, ncols=2)
    ax = axes[0][0]
    levels = report["levels"]
    depths = [row["depth"] for row in levels]
    paper = [float(row["p_leader_paper"]) for row in levels]
    exact = [float(row["p_leader_exact"]) for row in levels]
    width = 0.38
    ax.bar([d - width / 2 for d in depths], paper, width, label=r"$D^{n_{max}+1}-1$ denominator")
    ax.bar([d + width / 2 for d in depths], exact, width, label="exact node count denominator")
    ax.set_xlabel("depth")
    ax.set_ylabel("P(random node is leader at depth)")
    ax.set_xticks(depths)
    ax.legend()

    ax = axes[0][1]
    rel = report.get("reliability")
    if rel:
        rows = rel["rows"]
        d = [r["depth"] for r in rows]
        ax.plot(d, [float(r["path_reliability"]) for r in rows], "o-", label="$(1-q)^n$")
        ax.plot(d, [float(r["last_link_failure"]) for r in rows], "s-", label="last link fails")
        if rows and "mc_path_reliability" in rows[0]:
            ax.plot(d, [r["mc_path_reliability"] for r in rows], "x", color="k", label="Monte Carlo")
            ax.plot(d, [r["mc_last_link_failure"] for r in rows], "x", color="k")
        ax.set_xlabel("leader depth")
        ax.set_ylabel("probability")
        ax.set_title(f"link failure q = {float(rel['q']):g}")
        ax.legend()
    else:
        ax.axis("off")
    save(fig, path)


def _layout(children, root):
    """Leaves get consecutive x slots, parents sit over their children."""
    pos, counter = {}, [0]

    def place(v, depth):
        kids = children.get(v, [])
        if not kids:
            pos[v] = (counter[0], -depth)
            counter[0] += 1
        else:
            for c in kids:
                place(c, depth + 1)
            pos[v] = (sum(pos[c][0] for c in kids) / len(kids), -depth)

    place(root, 0)
    return pos


def _draw_tree(ax, children, root, labels, leaders):
    pos = _layout(children, root)
    for v, kids in children.items():
        for c in kids:
            ax.plot([pos[v][0], pos[c][0]], [pos[v][1], pos[c][1]], color="0.4", zorder=1)
    for v, (x, y) in pos.items():
        color = LEADER_COLOR if v in leaders else NODE_COLOR
        ax.scatter([x], [y], s=260, color=color, zorder=2, edgecolors="k")
        ax.annotate(labels.get(v, ""), (x, y), ha="center", va="center", fontsize=7, zorder=3)
    ax.set_axis_off()


def plan_tree_figure(plan, path):
    children, labels = {(): []}, {(): "root"}
    leaders = {tuple(p): leader for leader, p in plan.paths.items()}
    for p in sorted({tuple(p[:k]) for p in plan.paths.values() for k in range(1, len(p) + 1)}):
        children.setdefault(p[:-1], []).append(p)
        children.setdefault(p, [])
        labels[p] = str(leaders.get(p, ""))
    fig, axes = figure(6.0)
    _draw_tree(axes[0][0], children, (), labels, set(leaders))
    axes[0][0].set_title("prefix-free leader paths")
    save(fig, path)


def plan_graph_figure(plan, embedded, path):
    labels = {v: str(v) for v in embedded.depth}
    for leader, v in plan.placement.items():
        labels[v] = f"{v}\n{leader}"
    fig, axes = figure(6.0)
    _draw_tree(axes[0][0], embedded.children, embedded.root, labels, set(plan.placement.values()))
    axes[0][0].set_title(f"embedded binary tree (MST weight {plan.mst_weight})")
    save(fig, path)


def gossip_figure(field, leveling, sectoring, path):
    fig, axes = figure(5.0, 5.0)
    ax = axes[0][0]
    cmap = plt.get_cmap("viridis")
    top = max(leveling.max_level, 1)
    for v in field.ids:
        x, y = field.nodes[v]
        if v in leveling.level:
            ax.scatter([x], [y], color=cmap((leveling.level[v] - 1) / top), s=30, zorder=2)
        else:
            ax.scatter([x], [y], color="r", marker="x", s=30, zorder=2)
    bx, by = field.base_station
    ax.scatter([bx], [by], marker="^", s=120, color="k", zorder=3, label="base station")
    span = max((math.dist(p, field.base_station) for p in field.nodes.values()), default=field.radius)
    for k in range(sectoring.sectors if sectoring.sectors > 1 else 0):
        a = math.radians(360.0 * k / sectoring.sectors)
        ax.plot([bx, bx + span * math.cos(a)], [by, by + span * math.sin(a)], ":", color="0.5", lw=0.8)
    ax.set_aspect("equal")
    ax.set_title("levels (colour) and sectors")
    ax.legend(loc="upper right")
    save(fig, path)


def fusion_figure(problem, profile, outputs, path):
    golden = (math.sqrt(5) - 1.0) / 2.0
    with plt.rc_context(STYLE):
        fig, (top, bottom) = plt.subplots(2, 1, figsize=(7.0, 7.0 * golden), sharex=True,
                                          gridspec_kw={"height_ratios": [3, 2]})
    rows = len(problem.intervals)
    for k, iv in enumerate(problem.intervals):
        top.plot([float(iv.lo), float(iv.hi)], [rows - k, rows - k], color="0.3", lw=3, solid_capstyle="butt")
    for j, (name, regions) in enumerate(outputs.items()):
        y = -j - 0.5
        for iv in regions:
            top.plot([float(iv.lo), float(iv.hi)], [y, y], lw=4, solid_capstyle="butt", color=f"C{j}")
        top.annotate(name.upper() if name != "omega" else "Omega peak", (float(regions[0].lo), y),
                     xytext=(0, 4), textcoords="offset points", fontsize=7)
    top.set_yticks(range(1, rows + 1), [f"I{rows - k}" for k in range(rows)])
    top.set_title(f"n = {problem.n}, f = {problem.f}")

    xs, ys = [], []
    for lo, hi, count in profile.regions():
        xs += [float(lo), float(hi)]
        ys += [count, count]
    bottom.plot(xs, ys, color="tab:orange", label="overlap count")
    bottom.axhline(problem.threshold, ls="--", color="k", lw=0.8, label="n - f")
    bottom.set_xlabel("value")
    bottom.set_ylabel("count")
    bottom.legend(loc="upper right")
    save(fig, path)
