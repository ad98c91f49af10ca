"""Newton-equation residual of the smooth fixtures as the grid step shrinks.

Prints one row per (fixture, step); the residual should fall by about 4 per halving.
"""

import dataclasses

from indyn import fixtures, simulate
from indyn.core import TimeGrid
from indyn.verify import newton_residual


def main() -> None:
    print(f"{'fixture':<18}{'step':>10}{'residual':>12}{'ratio':>8}")
    for name in fixtures.SMOOTH:
        base = fixtures.load(name)
        prev = None
        for samples in (251, 501, 1001, 2001, 4001):
            c = dataclasses.replace(base, time=TimeGrid(base.time.start, base.time.end, samples))
            r = newton_residual(c.model, simulate(c), c.gamma_squared).newton_residual_max
            ratio = f"{prev / r:8.2f}" if prev else " " * 8
            print(f"{name:<18}{c.time.step:>10.2e}{r:>12.3e}{ratio}")
            prev = r


if __name__ == "__main__":
    main()
