#!/usr/bin/env python3
"""Re-derive the shipped 8-line configuration for n = 2, delta = 2 and the
excon chord choice, and confirm they match the constants in the package."""

import argparse
import sys

from quadheights.arrangements import five_rank_check, general_position
from quadheights.generators import EXINF_22_LINES, excon_config, search_exinf_lines


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=3, help="largest |z-offset| / parameter tried")
    a = ap.parse_args()

    found = search_exinf_lines(a.bound)
    print("exinf (2,2) lines:", [list(r) for r in found])
    print("  general position:", general_position(found), " five-rank:", five_rank_check(found))
    same = tuple(found) == EXINF_22_LINES
    print("  matches shipped constant:", same)

    ex = excon_config(a.bound)
    print("excon chords:", [list(c.linear_coefficients()) for c in ex.chords])
    print("  extra chord points q_i:", ex.chord_params)
    print("  five-rank:", five_rank_check(list(ex.arrangement)))
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
