"""Regenerate the world-line pictures (SVG) and their trajectory tables (CSV).

Usage: python3 scripts/world_line_figures.py [OUTDIR]   (default: figures/)
"""

import sys
from pathlib import Path

from indyn import fixtures, simulate
from indyn.io import ExportBundle, events_jsonl, metadata_json, trajectories_csv
from indyn.plot import emit_plot

FIGURES = {
    "fig1_cm_repulsive": "CM, 2 particles, repulsion",
    "fig2_cm_attractive": "CM, 2 particles, attraction",
    "fig3_cm_four": "CM, 4 particles, attraction",
    "fig4_cm_five": "CM, 5 particles, attraction",
    "fig5_goldfish_billiard": "Goldfish, 6 particles",
    "cm_unstable_pair": "CM, conjugate pair",
    "rs_attractive": "RS, 2 particles, attraction",
    "sg_repulsive": "sinh-Gordon, same labels (lab frame)",
    "sg_opposite": "sinh-Gordon, opposite labels (lab frame)",
    "sg_breather": "sinh-Gordon, conjugate pair",
}


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, title in FIGURES.items():
        config = fixtures.load(name)
        lines = simulate(config)
        (out / f"{name}.svg").write_text(emit_plot(lines, title=title))
        (out / f"{name}.csv").write_text(trajectories_csv(lines))
        (out / f"{name}.events.jsonl").write_text(events_jsonl(lines))
        (out / f"{name}.meta.json").write_text(metadata_json(ExportBundle(lines, config)))
        print(f"{name}: {len(lines.lines)} lines, {len(lines.events)} events")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figures"))
