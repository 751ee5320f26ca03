"""Published result tables used as fixture inputs (US$ Bn).

Grids are keyed ``(model, method)``.  Direct shocks are per parameterization.
"""

MODELS = ("leontief_ghosh", "critical_input", "inoperability")
METHODS = ("household", "kwh", "luminosity")


def _grid(rows):
    return {(m, p): rows[i][j] for i, p in enumerate(METHODS) for j, m in enumerate(MODELS)}


EVENTS = {
    "ian": {
        "direct": {"household": 0.0432, "kwh": 0.0991, "luminosity": 0.161},
        "domestic": _grid([[0.0765, 3.78, 0.0293], [0.176, 8.68, 0.0673], [0.286, 14.1, 0.109]]),
        "global": _grid([[0.0885, 4.09, 0.0359], [0.2031, 9.39, 0.0823], [0.330, 15.3, 0.134]]),
        "table9": {"mean": 3.13, "std": 5.07, "min": 0.0725},
        "table10": {"mean": 3.29, "std": 5.49},
        "table11": {"leontief_ghosh": (0.120, 0.389), "critical_input": (5.59, 0.577), "inoperability": (0.049, 0.265)},
    },
    "texas": {
        "direct": {"household": 0.0667, "kwh": 0.192, "luminosity": 0.148},
        "domestic": _grid([[0.118, 5.84, 0.0453], [0.340, 16.8, 0.130], [0.262, 13.0, 0.100]]),
        "global": _grid([[0.137, 6.32, 0.0555], [0.394, 18.2, 0.159], [0.304, 14.0, 0.123]]),
        "table9": {"mean": 4.18, "std": 6.48, "min": 0.112},
        "table10": {"mean": 4.41, "std": 7.00},
        "table11": {"leontief_ghosh": (0.148, 0.334), "critical_input": (6.02, 0.46), "inoperability": (0.0528, 0.212)},
    },
    "isaias": {
        "direct": {"household": 0.0511, "kwh": 0.0911, "luminosity": 0.1422},
        "domestic": _grid([[0.0905, 4.47, 0.0347], [0.161, 7.98, 0.0619], [0.252, 12.4, 0.0965]]),
        "global": _grid([[0.104, 4.82, 0.0425], [0.186, 8.63, 0.0767], [0.291, 13.5, 0.118]]),
        "table9": {"mean": 2.93, "std": 4.55, "min": 0.0432},
        "table10": {"mean": 3.09, "std": 4.93},
        "table11": {"leontief_ghosh": (0.0936, 0.324), "critical_input": (4.33, 0.477), "inoperability": (0.0379, 0.217)},
    },
}
