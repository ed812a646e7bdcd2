"""Parameter sweeps from the reference configurations.

The reference/ directory holds configs reconstructing the trends of the
original figures. This script runs them through the same code path as
``brownpair sweep`` and prints the summary tables. Nothing is written to
disk; use the command line for CSV output.
"""

# %%
from pathlib import Path

from brownpair.cli import SUMMARY_COLUMNS, load_config, run_sweep

REFERENCE = Path(__file__).resolve().parent.parent / "reference"

# %%
for name in ("fig2_temperature", "fig3_damping", "fig4_distance", "fig5_revival"):
    cfg = load_config(REFERENCE / f"{name}.cfg")
    sweep = run_sweep(cfg, workers=4)
    print(f"\n{name}  (sweep over {sweep.axis})")
    print(f"{sweep.axis:>8} " + " ".join(f"{c:>15}" for c in SUMMARY_COLUMNS))
    for row in sweep.summary:
        print(f"{row[0]:>8g} " + " ".join(f"{x:>15.4f}" for x in row[1:]))
