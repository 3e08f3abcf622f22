"""Spherical helix with kappa = 1/sqrt(1-s^2), tau = -kappa, and its mate.

Prints the curvature errors, the mate curvature and torsion, the
spherical checks, and writes curve and mate projections as SVG files.

Usage: python3 scripts/example17.py [--out-dir DIR] [--samples N]
"""

import argparse
import pathlib
import warnings

import numpy as np

from oscmate import classify, export, mates
from oscmate.catalog import sampled_catalog_curve
from oscmate.numerics import sphere_fit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--samples", type=int, default=2001)
    args = ap.parse_args()
    warnings.simplefilter("ignore")

    base = sampled_catalog_curve("paper_spherical_helix", samples=args.samples)
    root = np.sqrt(1 - base.s**2)
    print(f"max |kappa sqrt(1-s^2) - 1| = {np.max(np.abs(base.kappa * root - 1)):.2e}")
    print(f"max |tau sqrt(1-s^2) + 1|   = {np.max(np.abs(base.tau * root + 1)):.2e}")
    rep = classify.classify_report(base)
    print(f"curve spherical: {rep['spherical']}, radius {rep.verdicts['spherical'].witness['radius']:.10f}")

    m = mates.osculating_mate(base)
    print(f"epsilon1 schedule: {[(iv.lo, iv.hi, iv.sign) for iv in m.epsilon1]}")
    print(f"mate kappa_bar in [{np.nanmin(m.kappa_bar):.6f}, {np.nanmax(m.kappa_bar):.6f}]")
    print(f"mate tau_bar in   [{np.nanmin(m.tau_bar):.6f}, {np.nanmax(m.tau_bar):.6f}]")
    mrep = classify.classify_mate(m)
    fit = sphere_fit(m.mate.position)
    print(f"mate salkowski: {mrep['salkowski']}, mate spherical: {mrep['spherical']}")
    print(f"mate sphere fit: radius {fit.radius:.6f}, rms residual {fit.residual_rms:.2e}")
    eq = classify.mate_spherical_residual(base, m.theta, 1.0)
    print(f"spherical-mate condition residual (a=1): {np.nanmax(eq.residual):.2e}")

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for label, data in (("curve", base), ("mate", m)):
        for plane in ("xy", "xz"):
            path = out / f"example17_{label}_{plane}.svg"
            export.export_svg(data, plane, str(path))
            print(f"wrote {path}")


if __name__ == "__main__":
    main()
