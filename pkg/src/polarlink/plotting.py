"""File-only matplotlib rendering for simulation reports.

Every report command can drop a PNG next to its CSV; nothing is ever shown
interactively (Agg backend).
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_BER_FLOOR = 1e-9  # keeps zero-error points on the log axis


def save_ber_figure(series, path, xlabel="SNR (dB)", title=None):
    """Semilog BER curves; series maps label -> (params, bers)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for label, (params, bers) in series.items():
        bers = np.maximum(np.asarray(bers, dtype=float), _BER_FLOOR)
        ax.semilogy(params, bers, marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("bit error rate")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(records, path, title=None):
    series = {}
    for rec in records:
        key = f"{rec.codec} {rec.channel}"
        series.setdefault(key, ([], []))
        series[key][0].append(rec.param)
        series[key][1].append(rec.ber)
    xlabel = "erasure probability" if records and records[0].channel == "bec" else "SNR (dB)"
    save_ber_figure(series, path, xlabel=xlabel, title=title)


def save_rules_figure(rows, path, title=None):
    series = {}
    for row in rows:
        key = f"{row['channel']} {row['rule']}"
        series.setdefault(key, ([], []))
        series[key][0].append(row["snr_db"])
        series[key][1].append(row["ber"])
    save_ber_figure(series, path, title=title)


def save_media_figure(result, path, title=None):
    """Per-trial metric scatter with the mean marked."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    finite = np.isfinite(result.values)
    trials = np.arange(result.values.size)
    ax.plot(trials[finite], result.values[finite], "o", alpha=0.6, label="trial")
    if finite.any() and np.isfinite(result.mean):
        ax.axhline(result.mean, color="C1", label=f"mean = {result.mean:.2f} dB")
    ax.set_xlabel("trial")
    ylabel = "PSNR (dB)" if result.metric == "psnr" else "spectral distortion (dB)"
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_zvector_figure(z, path, title=None):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    z = np.asarray(z, dtype=float)
    ax.semilogy(np.arange(z.size), np.maximum(z, 1e-300), ".", markersize=2)
    ax.set_xlabel("bit-channel index")
    ax.set_ylabel("reliability parameter")
    ax.grid(True, which="both", alpha=0.3)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
