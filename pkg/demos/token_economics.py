"""Render the token-economics table for one routed experiment.

Grand totals (routing overhead included on the routed side) from a routed
run over four public benchmarks, against two static baselines: S sends every
task through direct few-shot sampling, I sends every task through two-stage
generation. The R2S/R2I rows show what routing saves against each.
"""

from fractions import Fraction

from routegen import display_int, display_pct, reduction, token_report

ROUTED = {
    "HumanEval": 3_774_494,
    "MBPP-sanitized": 6_020_323,
    "OpenEval": 3_429_603,
    "McEval": 925_268,
}

BASELINES = {
    "S": {
        "HumanEval": 5_118_415,
        "MBPP-sanitized": 14_762_151,
        "OpenEval": 5_295_607,
        "McEval": 1_865_235,
    },
    "I": {
        "HumanEval": 4_980_141,
        "MBPP-sanitized": 14_706_320,
        "OpenEval": 4_867_249,
        "McEval": 1_760_589,
    },
}

# Classifier prompt+reply totals; zero where labels were reused, not predicted.
ROUTING = {
    "HumanEval": 42_872,
    "MBPP-sanitized": 61_001,
    "OpenEval": 35_328,
    "McEval": 0,
}


def main() -> None:
    print(token_report(ROUTED, BASELINES, routing_totals=ROUTING))
    print()

    row = reduction(BASELINES["S"]["MBPP-sanitized"], ROUTED["MBPP-sanitized"],
                    benchmark="MBPP-sanitized", baseline_name="S")
    print(f"biggest win: MBPP-sanitized vs S, {display_int(row.reduction_abs):,} tokens "
          f"({display_pct(row.reduction_pct)}%) saved")

    # Display conventions: exact fractions inside, half-away-from-zero at the edge.
    tie = Fraction(2_856_422, 4)
    print(f"display rounding on a .5 tie: {tie} -> {display_int(tie):,}")


if __name__ == "__main__":
    main()
