"""Compare Frobenius slopes from Gauss sums with the Newton polygon of the L-polynomial."""

import argparse
from dataclasses import dataclass, field

from ltlab import frobenius


@dataclass
class SlopeConfig:
    primes: list = field(default_factory=lambda: [3, 5, 7, 11, 13])


def fmt(poly) -> str:
    return " ".join(f"{n}/{d}x{m}" for n, d, m in poly.as_list())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=SlopeConfig().primes)
    cfg = SlopeConfig(ap.parse_args().primes)
    for p in cfg.primes:
        g = frobenius.gauss_slopes(p)
        line = f"p={p:>2}  gauss: {fmt(g)}"
        if p in (3, 5):
            z = frobenius.zeta_slopes(p)
            agree = sorted(g.multiset()) == sorted(z.multiset())
            line += f"  | zeta: {fmt(z)}  agree={agree}"
            print(line)
            print(f"       L(T) = {frobenius.l_polynomial(p).coeffs}")
        else:
            print(line)
        t = frobenius.stickelberger_check(p, strict=False)
        print(
            f"       Stickelberger: {len(t.rows)} pairs, valuations ok={t.valuations_ok}, "
            f"units ok={t.passed}, rows with unit -1/j: {t.literal_agreements}"
        )


if __name__ == "__main__":
    main()
