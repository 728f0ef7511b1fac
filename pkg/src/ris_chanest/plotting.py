"""Figure rendering for sweep results.

The CLI report path saves one PNG per channel group next to the CSV
output: closed-form curves as lines, Monte Carlo points as markers.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["save_nmse_figures"]

_GROUPS = (
    ("direct", "nmse_direct.png", "Direct channel NMSE"),
    ("cascade", "nmse_cascade.png", "Cascade channel NMSE (column average)"),
)


def save_nmse_figures(curves, estimators, out_dir, closed_form_only=False):
    """Render NMSE-vs-SNR figures; returns the written paths."""
    snr = [c.snr_db for c in curves]
    paths = []
    for group, fname, title in _GROUPS:
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        for i, name in enumerate(estimators):
            color = f"C{i}"
            cf = [getattr(c.per_estimator[name], f"{group}_cf") for c in curves]
            ax.semilogy(snr, cf, "--", color=color, label=f"{name} closed form")
            if not closed_form_only:
                emp = [getattr(c.per_estimator[name], f"{group}_emp") for c in curves]
                ax.semilogy(
                    snr, emp, "o", color=color, mfc="none", label=f"{name} monte carlo"
                )
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("NMSE")
        ax.set_title(title)
        ax.grid(True, which="both", linestyle=":", linewidth=0.6)
        ax.legend(fontsize=8)
        path = os.path.join(out_dir, fname)
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths
