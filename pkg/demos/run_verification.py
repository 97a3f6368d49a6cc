"""Reduced verification run: every check on 200 random data.

The full report (1000 data, 200x200 frontier scan) is ``ep-blowup verify``;
this one finishes in well under a minute.
"""
from ep_blowup import verification

report = verification.run_all(seed=1, n_cases=200, n_conservation=20, n_harmonic=50,
                              frontier_resolution=40)
print(report.to_text())

led = {e["item"]: e for e in report.ledger}
print("R0 convention matching the integration:",
      f"resolved {led['R0']['resolved_match_fraction']:.3f},",
      f"alternative {led['R0']['printed_match_fraction']:.3f}")
