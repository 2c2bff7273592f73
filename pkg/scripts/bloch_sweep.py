"""Print the restricted-fidelity gap over the M2 Bloch circle for a generic faithful pair."""
import argparse

import numpy as np

from buresalg.constructions import faithful_m2_instance
from buresalg.subalgebras import bloch_sweep


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--angle", type=float, default=37.0, help="eigenvector angle of x in degrees")
    p.add_argument("--points", type=int, default=360)
    p.add_argument("--tol", type=float, default=1e-7)
    args = p.parse_args(argv)
    inst = faithful_m2_instance(np.deg2rad(args.angle))
    thetas, gaps = bloch_sweep(inst.nu, inst.rho, args.points)
    for th, g in zip(thetas, gaps):
        mark = "  <- minimizing" if abs(g) <= args.tol else ""
        print(f"{np.rad2deg(th):7.2f}  {g: .3e}{mark}")
    hits = [i for i, g in enumerate(gaps) if abs(g) <= args.tol]
    print(f"minimizing grid points: {hits}")


if __name__ == "__main__":
    main()
