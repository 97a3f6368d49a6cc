"""Phase diagram of the zero-velocity plane (G0, div E0).

The integration oracle classifies each cell; a straight line is fitted to
the Smooth/BlowUp boundary and compared with the two candidate lines
div E0 = 2 G0 + 1/2 and div E0 = 6 G0 - 1/2.
"""
from ep_blowup import fit_frontier, scan_plane
from ep_blowup.sweep import figure_request

req = figure_request("fig1-left", method="oracle", resolution=80)
res = scan_plane(req, with_time=False)
print("cell counts:", res.counts())

fit = fit_frontier(res)
print(f"fitted frontier: div E0 = {fit.slope:.4f} G0 + {fit.intercept:+.4f} "
      f"(max residual {fit.max_residual_cells:.2f} cells, {fit.n_points} boundary points)")
for name, (k, b) in {"2 G0 + 1/2": (2, 0.5), "6 G0 - 1/2": (6, -0.5)}.items():
    print(f"  distance to {name}: {abs(fit.slope - k) + abs(fit.intercept - b):.4f}")

# rough picture, G0 across, div E0 up
sym = {"Smooth": ".", "BlowUp": "#", "Marginal": "~", "Inadmissible": " "}
for j in range(res.verdict.shape[1] - 1, -1, -4):
    print("".join(sym[res.verdict[i, j]] for i in range(0, res.verdict.shape[0], 2)))
res.to_csv("zero_velocity_plane.csv")
