import csv
import os
from pathlib import Path

OUT = Path(os.environ.get("PTRABI_DEMO_OUT", Path(__file__).parent / "output"))


def save_csv(name, header, rows):
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / name
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print("wrote", path)
    return path


def pyplot():
    """matplotlib.pyplot with a headless backend, or None when it is not installed."""
    try:
        import matplotlib
    except ImportError:
        return None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_figure(fig, name):
    OUT.mkdir(parents=True, exist_ok=True)
    fig.savefig(OUT / name, dpi=120, bbox_inches="tight")
    print("wrote", OUT / name)
