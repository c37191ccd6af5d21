"""Reference token grand totals used as regression fixtures.

Four public benchmarks at three model scales. For each scale: the routed
run's total, the two static baselines it is compared against (S = every
task direct, I = every task two-stage), and the expected reduction cells
as (absolute drop, percentage string) including the Avg column. ROUTING
holds the classifier-call totals (the RT row). All values are frozen;
tests must reproduce the expected cells from the raw totals exactly.
"""

from __future__ import annotations

BENCHMARKS = ("HumanEval", "MBPP-sanitized", "OpenEval", "McEval")

# Classifier prompt+reply totals per benchmark; shared by every scale.
ROUTING = {
    "HumanEval": 42_872,
    "MBPP-sanitized": 61_001,
    "OpenEval": 35_328,
    "McEval": 0,
}
ROUTING_AVG_DISPLAY = "34,800"

SCALES = {
    "3B": {
        "routed": {
            "HumanEval": 3_309_539,
            "MBPP-sanitized": 4_909_856,
            "OpenEval": 3_149_950,
            "McEval": 835_969,
        },
        "baselines": {
            "S": {
                "HumanEval": 4_191_205,
                "MBPP-sanitized": 12_857_146,
                "OpenEval": 4_294_749,
                "McEval": 1_501_005,
            },
            "I": {
                "HumanEval": 4_275_896,
                "MBPP-sanitized": 12_770_188,
                "OpenEval": 4_490_805,
                "McEval": 1_560_068,
            },
        },
        "expected": {
            "S": {
                "HumanEval": (881_666, "21.04"),
                "MBPP-sanitized": (7_947_290, "61.81"),
                "OpenEval": (1_144_799, "26.66"),
                "McEval": (665_036, "44.31"),
                "Avg": ("2,659,698", "46.57"),
            },
            "I": {
                "HumanEval": (966_357, "22.60"),
                "MBPP-sanitized": (7_860_332, "61.55"),
                "OpenEval": (1_340_855, "29.86"),
                "McEval": (724_099, "46.41"),
                "Avg": ("2,722,911", "47.16"),
            },
        },
    },
    "6.7B": {
        "routed": {
            "HumanEval": 3_774_494,
            "MBPP-sanitized": 6_020_323,
            "OpenEval": 3_429_603,
            "McEval": 925_268,
        },
        "baselines": {
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
        },
        "expected": {
            "S": {
                "HumanEval": (1_343_921, "26.26"),
                "MBPP-sanitized": (8_741_828, "59.22"),
                "OpenEval": (1_866_004, "35.24"),
                "McEval": (939_967, "50.39"),
                "Avg": ("3,222,930", "47.67"),
            },
            "I": {
                "HumanEval": (1_205_647, "24.21"),
                "MBPP-sanitized": (8_685_997, "59.06"),
                "OpenEval": (1_437_646, "29.54"),
                "McEval": (835_321, "47.45"),
                "Avg": ("3,041,153", "46.23"),
            },
        },
    },
    "V3": {
        "routed": {
            "HumanEval": 993_628,
            "MBPP-sanitized": 1_907_516,
            "OpenEval": 1_050_021,
            "McEval": 230_027,
        },
        "baselines": {
            "S": {
                "HumanEval": 1_333_100,
                "MBPP-sanitized": 4_335_969,
                "OpenEval": 1_399_146,
                "McEval": 471_552,
            },
            "I": {
                "HumanEval": 1_225_360,
                "MBPP-sanitized": 4_071_784,
                "OpenEval": 1_324_069,
                "McEval": 416_401,
            },
        },
        "expected": {
            "S": {
                "HumanEval": (339_472, "25.46"),
                "MBPP-sanitized": (2_428_453, "56.01"),
                "OpenEval": (349_125, "24.95"),
                "McEval": (241_525, "51.22"),
                "Avg": ("839,644", "44.54"),
            },
            "I": {
                "HumanEval": (231_732, "18.91"),
                "MBPP-sanitized": (2_164_268, "53.15"),
                "OpenEval": (274_048, "20.70"),
                "McEval": (186_374, "44.76"),
                # The mean of the absolute drops lands exactly on .5 here,
                # pinning the away-from-zero display convention.
                "Avg": ("714,106", "40.59"),
            },
        },
    },
}
