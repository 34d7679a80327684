"""λ₁ error under mesh doubling; the error ratio should approach 4.

Usage:
    python scripts/convergence_study.py
    python scripts/convergence_study.py --dim 2 --sizes 8 16 32 64
"""

import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from trisolve.discretization import build_mesh, first_eigenpair


def main():
    parser = argparse.ArgumentParser(description="Eigenvalue convergence under mesh doubling")
    parser.add_argument("--dim", type=int, default=1, choices=[1, 2])
    parser.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256, 512, 1024])
    args = parser.parse_args()

    exact = args.dim * math.pi**2
    print(f"\nExact lambda1 on the unit {'interval' if args.dim == 1 else 'square'}: {exact:.10f}\n")
    print(f"  {'n':>6}  {'lambda1':>16}  {'error':>12}  {'ratio':>8}")
    previous = None
    for n in sorted(args.sizes):
        pair = first_eigenpair(build_mesh(args.dim, n, 1.0))
        error = abs(pair.value - exact)
        ratio = f"{previous / error:8.3f}" if previous else " " * 8
        print(f"  {n:>6}  {pair.value:16.10f}  {error:12.4e}  {ratio}")
        previous = error


if __name__ == "__main__":
    main()
