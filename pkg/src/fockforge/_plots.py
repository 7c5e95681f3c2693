"""Figure rendering for the CLI report path.

Each suite may attach figure specs; they are rendered to PNG files next
to the delimited tables.  matplotlib is imported lazily so library users
and non-png runs never touch it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass
class FigureSpec:
    name: str
    kind: str          # residual_bars | diag_matrix | ratio_curves | moment_ratios
    payload: dict


def _log_floor(values, floor=1e-18):
    return [max(abs(v), floor) for v in values]


def render_figures(figures: list[FigureSpec], outdir: Path, prefix: str) -> list[str]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for spec in figures:
        fig, ax = plt.subplots(figsize=(7.0, 4.2))
        if spec.kind == "residual_bars":
            labels = spec.payload["labels"]
            values = _log_floor(spec.payload["values"])
            ax.bar(range(len(values)), values, color="#3465a4")
            ax.set_yscale("log")
            if spec.payload.get("tolerance"):
                ax.axhline(spec.payload["tolerance"], color="crimson", ls="--",
                           label=f"tolerance {spec.payload['tolerance']:.1e}")
                ax.legend()
            step = max(1, len(labels) // 40)
            ax.set_xticks(range(0, len(labels), step))
            ax.set_xticklabels(labels[::step], rotation=90, fontsize=6)
            ax.set_ylabel("residual")
        elif spec.kind == "diag_matrix":
            import numpy as np
            mat = np.asarray(spec.payload["matrix"], dtype=float)
            im = ax.matshow(mat, cmap="viridis")
            fig.colorbar(im, ax=ax)
            ax.set_xlabel("probe ordinal")
            ax.set_ylabel("probe ordinal")
        elif spec.kind == "ratio_curves":
            groups: dict = {}
            for nu, z, ratio in spec.payload["rows"]:
                groups.setdefault(nu, []).append((z, ratio))
            for nu, pts in sorted(groups.items()):
                pts.sort()
                ax.plot([p[0] for p in pts], [p[1] for p in pts],
                        marker="o", label=f"nu={nu:g}")
            ax.set_xlabel("z")
            ax.set_ylabel(spec.payload.get("ylabel", "ratio"))
            ax.legend()
        elif spec.kind == "moment_ratios":
            degrees = [str(d) for d in spec.payload["degrees"]]
            ratios = spec.payload["ratios"]
            ax.plot(range(len(ratios)), ratios, marker="s", color="#3465a4")
            if spec.payload.get("reference") is not None:
                ax.axhline(spec.payload["reference"], color="gray", ls=":",
                           label=f"reference {spec.payload['reference']:.6g}")
                ax.legend()
            ax.set_xticks(range(len(degrees)))
            ax.set_xticklabels(degrees, rotation=45, fontsize=7)
            ax.set_ylabel("moment ratio")
        else:
            plt.close(fig)
            continue
        ax.set_title(spec.payload.get("title", spec.name), fontsize=9)
        fig.tight_layout()
        path = outdir / f"{prefix}_{spec.name}.png"
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(str(path))
    return written
