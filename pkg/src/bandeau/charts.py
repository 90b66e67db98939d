"""Delimited sweep tables and matplotlib figures for reports."""

from __future__ import annotations

import csv
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SWEEP_FIELDS = ["k", "objective", "bestAtMost", "uncovered", "cuts"]


def write_sweep_csv(path: str, rows: list[dict]) -> None:
    """One row per cut count: k, objective, running best, uncovered, cuts."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({key: row.get(key, "") for key in SWEEP_FIELDS})


def read_sweep_csv(path: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        out = []
        for row in csv.DictReader(fh):
            out.append({
                "k": int(row["k"]),
                "objective": float(row["objective"]),
                "bestAtMost": float(row["bestAtMost"]),
            })
        return out


def sweep_chart(rows: list[dict], path: str, title: str = "Cuts vs area below curve") -> None:
    """Objective against cut count, with the best-at-most overlay."""
    ks = [r["k"] for r in rows]
    objs = [r["objective"] for r in rows]
    best = [r["bestAtMost"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, objs, "o-", color="tab:blue", label="exactly k cuts")
    ax.plot(ks, best, "--", color="tab:orange", label="best with at most k")
    ax.set_xlabel("number of cuts")
    ax.set_ylabel("area below curve (mm$^2$)")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def percentile_chart(bucket_series: dict[str, list[list[float]]], path: str) -> None:
    """25th/50th/75th percentile of the objective per cut count, one panel
    per bucket; each inner list is one case's per-k objectives."""
    buckets = [b for b in bucket_series if bucket_series[b]]
    fig, axes = plt.subplots(1, max(len(buckets), 1), figsize=(5 * max(len(buckets), 1), 4),
                             squeeze=False)
    for ax, bucket in zip(axes[0], buckets):
        series = np.array([s for s in bucket_series[bucket] if all(math.isfinite(v) for v in s)])
        ks = np.arange(series.shape[1])
        for pct, style in ((25, ":"), (50, "-"), (75, "--")):
            ax.plot(ks, np.percentile(series, pct, axis=0), style, label=f"{pct}th pct")
        ax.set_title(bucket)
        ax.set_xlabel("number of cuts")
        ax.set_ylabel("area below curve (mm$^2$)")
        ax.grid(alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
