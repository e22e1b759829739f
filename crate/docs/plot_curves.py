"""Plot CSV output of `netcoh between-vs-within` or `netcoh greedy-vs-optimal`.

Usage: python plot_curves.py results/between_vs_within.csv out.png
"""
import sys

import matplotlib.pyplot as plt
import pandas as pd

src, dst = sys.argv[1], sys.argv[2]
df = pd.read_csv(src, comment="#")
fig, axes = plt.subplots(1, df["d_mode"].nunique(), figsize=(10, 4), squeeze=False)
for ax, (mode, rows) in zip(axes[0], df.groupby("d_mode")):
    if "mean_h_s_between" in rows:
        ax.plot(rows["k"], rows["mean_h_s_between"], marker="o", label="between")
        ax.plot(rows["k"], rows["mean_h_s_within"], marker="s", label="within")
        ax.set_ylabel("mean H_S")
    else:
        ax.plot(rows["k"], rows["mean_ratio"], marker="o", label="greedy / optimal")
        ax.set_ylabel("H_S ratio")
    ax.set_xlabel("edges added (k)")
    ax.set_title(f"D = {mode}")
    ax.legend()
fig.tight_layout()
fig.savefig(dst, dpi=150)
