"""Class verdicts for every catalog curve and its osculating mate.

Usage: python3 scripts/mate_report.py [--samples N] [--theta0 X]
"""

import argparse
import warnings

import numpy as np

from oscmate import catalog, classify, mates

CLASSES = ("plane", "general_helix", "slant_helix", "c_slant_helix", "spherical", "rectifying",
           "bertrand", "mannheim", "salkowski", "anti_salkowski")
SEEDED = {"random_frenet": {"seed": 9}}


def _fmt(v):
    # verdicts are True, False or None (deferred)
    return "defer" if v is None else ("yes" if v else "-")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=catalog.DEFAULT_SAMPLES)
    ap.add_argument("--theta0", type=float, default=0.0)
    args = ap.parse_args()
    warnings.simplefilter("ignore")

    print(f"{'curve':24s} {'of':5s} " + " ".join(f"{c[:13]:>13s}" for c in CLASSES))
    for name in catalog.CATALOG:
        base = catalog.sampled_catalog_curve(name, SEEDED.get(name), samples=args.samples)
        rows = [("curve", classify.classify_report(base))]
        with np.errstate(all="ignore"):
            if np.all(np.abs(base.tau) > 1e-9):
                rows.append(("mate", classify.classify_mate(mates.osculating_mate(base, args.theta0))))
        for of, rep in rows:
            cells = " ".join(f"{_fmt(rep.verdicts[c].verdict):>13s}"
                             for c in CLASSES)
            print(f"{name:24s} {of:5s} {cells}")


if __name__ == "__main__":
    main()
