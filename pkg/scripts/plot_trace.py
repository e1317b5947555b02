#!/usr/bin/env python3
"""Plot a trace.csv: output vs reference on top, tracking error below.

Plotting is deliberately kept out of the simulator; this viewer is the
documented external step and needs matplotlib.
"""
import argparse
import sys

import numpy as np


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("trace", help="path to a trace.csv written by the simulator")
    parser.add_argument("--save", metavar="PNG", help="write the figure instead of showing it")
    args = parser.parse_args()

    try:
        import matplotlib
        if args.save:
            matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("error: plotting requires matplotlib (pip install matplotlib)",
              file=sys.stderr)
        return 1

    data = np.genfromtxt(args.trace, delimiter=",", names=True)
    fig, (ax_top, ax_bot) = plt.subplots(2, 1, sharex=True, figsize=(9, 6))
    ax_top.plot(data["t"], data["xd"], label="reference", linewidth=1.0)
    ax_top.plot(data["t"], data["x1"], label="output", linewidth=1.0)
    ax_top.set_ylabel("angle [rad]")
    ax_top.legend(loc="upper right")
    ax_bot.plot(data["t"], data["e"], color="tab:red", linewidth=1.0)
    ax_bot.set_ylabel("tracking error [rad]")
    ax_bot.set_xlabel("time [s]")
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
        print(f"wrote {args.save}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
