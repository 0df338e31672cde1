#!/usr/bin/env python3
"""Regenerate the bundled defining-polynomial table (data/moduli.txt).

For each (p, h) in the shipped range this picks the monic primitive
polynomial of degree h over GF(p) whose coefficient vector (little-endian,
base-p encoded) is smallest.  The choice is arbitrary but frozen: element
indices in every downstream artifact depend on it.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from flagdesigns.fields import find_primitive_modulus

RANGES = {
    2: 20,
    3: 12,
    5: 8,
    7: 7,
    11: 5,
    13: 5,
    17: 4,
    19: 4,
    23: 4,
    29: 3,
    31: 3,
    37: 3,
    41: 3,
    43: 3,
    47: 3,
    53: 3,
    59: 3,
    61: 3,
    67: 3,
    71: 3,
    73: 3,
    79: 3,
    83: 3,
    89: 3,
    97: 3,
}


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "src" / "flagdesigns" / "data" / "moduli.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# p h c0 c1 ... ch  (defining polynomial, coefficients low to high)"]
    for p, hmax in RANGES.items():
        for h in range(1, hmax + 1):
            if p**h > 1 << 20:
                break
            coeffs = find_primitive_modulus(p, h)
            lines.append(" ".join(str(v) for v in [p, h, *coeffs]))
            print(f"GF({p}^{h}): {coeffs}")
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
