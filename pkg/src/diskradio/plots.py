"""Figure rendering for the CLI report path.

Every report command drops PNG figures next to its CSV output. The CSVs
stay the primary, diff-able artifacts; figures are for eyeballing runs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .signals import PowerSeries


def _save(fig, path: Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_series(series: PowerSeries, path, title: str = "band power",
                extra: PowerSeries | None = None,
                labels: tuple[str, str] = ("received", "transmitted")) -> Path:
    fig, ax = plt.subplots(figsize=(9, 3))
    ax.plot(series.times, series.samples, lw=0.8, label=labels[0])
    if extra is not None:
        ax.plot(extra.times, extra.samples, lw=0.8, alpha=0.6, label=labels[1])
        ax.legend(loc="best", frameon=False)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("power (dBm)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_spectrogram(times, freqs, matrix, path,
                     title: str = "band spectrogram") -> Path:
    fig, ax = plt.subplots(figsize=(9, 3.5))
    mesh = ax.pcolormesh(times, freqs, np.asarray(matrix).T, shading="auto",
                         cmap="inferno")
    fig.colorbar(mesh, ax=ax, label="dBm/bin")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("offset from center (Hz)")
    ax.set_title(title)
    return _save(fig, path)


def plot_ber_sweep(result, path) -> Path:
    pts = sorted(result.points, key=lambda p: p.snr_db)
    snr = [p.snr_db for p in pts]
    ber = [max(p.ber, 1e-5) for p in pts]
    lo = [max(p.ber - p.ci_low, 0.0) for p in pts]
    hi = [max(p.ci_high - p.ber, 0.0) for p in pts]
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.errorbar(snr, ber, yerr=[lo, hi], marker="o", capsize=3)
    ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    ax.set_title(f"BER vs SNR ({result.noise_profile} noise)")
    ax.grid(True, which="both", alpha=0.3)
    return _save(fig, path)


def plot_bit_time_sweep(points, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ts = [p.bit_time for p in points]
    levels = [p.on_level_dbm for p in points]
    ax.step(ts, levels, where="mid", marker="o")
    for p in points:
        if not p.decode_ok:
            ax.plot([p.bit_time], [p.on_level_dbm], "rx", ms=10)
    ax.set_xlabel("bit time (s)")
    ax.set_ylabel("on-level (dBm)")
    ax.set_title("on-level vs bit time")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_jam(clean: PowerSeries, jammed: PowerSeries, path) -> Path:
    fig, axes = plt.subplots(2, 1, figsize=(9, 4.5), sharex=True)
    axes[0].plot(clean.times, clean.samples, lw=0.8)
    axes[0].set_title("clean")
    axes[1].plot(jammed.times, jammed.samples, lw=0.8, color="tab:red")
    axes[1].set_title("jammed")
    for ax in axes:
        ax.set_ylabel("dBm")
        ax.grid(True, alpha=0.3)
    axes[1].set_xlabel("time (s)")
    return _save(fig, path)


def plot_roc(outcome, path) -> Path:
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    fpr = [outcome.at(t)[1] for t in outcome.thresholds]
    tpr = [outcome.at(t)[0] for t in outcome.thresholds]
    order = np.argsort(fpr)
    ax.plot(np.asarray(fpr)[order], np.asarray(tpr)[order], marker="o", ms=3)
    ax.plot([0, 1], [0, 1], "k--", alpha=0.3)
    recall, at_fpr = outcome.at(outcome.default_threshold)
    ax.plot([at_fpr], [recall], "r*", ms=12,
            label=f"threshold {outcome.default_threshold:g}")
    ax.set_xlabel("false-positive rate")
    ax.set_ylabel("recall")
    ax.set_title("detector ROC")
    ax.legend(loc="lower right", frameon=False)
    ax.grid(True, alpha=0.3)
    return _save(fig, path)
