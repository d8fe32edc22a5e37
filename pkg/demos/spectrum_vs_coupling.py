"""Bound states appear in the two-polariton spectrum as g/J grows.

For a 50-cavity ring at resonance we diagonalize every odd quasi-momentum
sector at four couplings and count the eigenvalues that sit inside a gap of
the scattering continuum.  Below g/J ~ sqrt(3) there are none; well above it
every sector carries one state under and one above the continuum.
"""


from jchbound import ModelParams, band_intervals, classify_eigenvalues, sector_sweep

N = 50
COUPLINGS = (0.1, 1.7, 2.0, 5.0)
SECTORS = range(1, N, 2)


def main():
    grid = [ModelParams(N, 0.0, 1.0, g) for g in COUPLINGS]
    for sol in sector_sweep(grid, SECTORS):
        g, p = sol.params.rabi, sol.sector
        if p == 1:
            print(f"\ng/J = {g}")
            print("   P  bound eigenvalues")
        bands = band_intervals(sol.params, p)
        lam = sol.physical_eigenvalues
        bound = lam[classify_eigenvalues(lam, bands) > 0]
        text = ", ".join(f"{x:+.4f}" for x in bound) if bound.size else "-"
        print(f"  {p:2d}  {text}")


if __name__ == "__main__":
    main()
