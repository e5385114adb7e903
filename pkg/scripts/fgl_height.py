"""Formal group of the curve: recognition rank, height and the leading terms of [p](x)."""

import argparse
import time
from dataclasses import dataclass

from ltlab import fgl


@dataclass
class HeightConfig:
    p: int = 3
    ydeg: int | None = None
    allow_large: bool = False


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--ydeg", type=int, default=None)
    ap.add_argument("--allow-large", action="store_true", help="permit p = 7 (slow)")
    a = ap.parse_args()
    cfg = HeightConfig(a.p, a.ydeg, a.allow_large)

    t0 = time.perf_counter()
    h = fgl.height_check(cfg.p, cfg.ydeg, allow_large=cfg.allow_large)
    print(f"p={cfg.p}: height {h.height}, [p](x) = p x + ... + {h.leading_unit} x^{h.first_exponent} + ... mod p")
    print(f"  v_1..v_h mod p at u = 0: {h.v_mod_p}   ({time.perf_counter() - t0:.1f} s)")
    if cfg.p in (3, 5):
        r = fgl.recognition_check(cfg.p, strict=False)
        print(f"  recognition: rank {r.rank} (display route {r.rank_display}), expected {cfg.p - 2}")
        for k, row in enumerate(r.v_linear, start=1):
            print(f"    v_{k} linear part in u_1..u_{cfg.p - 2}: {row}")


if __name__ == "__main__":
    main()
