"""Built-in benchmark trial worlds.

The registry covers the two objective families:

* DS1-DS4 and DS-CBASP stress the variance objective: a dominant-variance
  subpopulation (DS1), the same world with that subpopulation rare (DS2),
  eight subpopulations with geometrically growing variances (DS3),
  within-subpopulation variance imbalance (DS4), and a three-subpopulation
  world with near-homogeneous variances on a symptom-score scale (DS-CBASP).
* DS21-DS24 and DS2-CBASP stress treatment selection: uniformly large gaps
  (DS21), one subpopulation with a small clinically relevant gap (DS22),
  rare subpopulations (DS23), many subpopulations (DS24), and the
  symptom-score world with a rare first subpopulation (DS2-CBASP).
"""

from __future__ import annotations

import numpy as np

from .model import DatasetSpec


def _spec(name, p, mu, sigma2) -> DatasetSpec:
    return DatasetSpec(name=name, p=np.array(p), mu=np.array(mu), sigma2=np.array(sigma2))


_CBASP_MU = [[10.9, 16.2], [9.3, 19.4], [12.9, 15.8]]
_CBASP_SIGMA2 = [[99.3, 79.7], [110.7, 55.9], [103.5, 78.6]]

_REGISTRY: dict[str, DatasetSpec] = {
    spec.name: spec
    for spec in (
        _spec(
            "DS1",
            [0.25, 0.25, 0.25, 0.25],
            [[1, 4], [2, 2], [4, 1], [2, 2]],
            [[1000, 1000], [100, 100], [100, 100], [100, 100]],
        ),
        _spec(
            "DS2",
            [0.1, 0.3, 0.3, 0.3],
            [[1, 4], [2, 2], [4, 1], [2, 2]],
            [[1000, 1000], [100, 100], [100, 100], [100, 100]],
        ),
        _spec(
            "DS3",
            [0.125] * 8,
            [[2, 2]] * 8,
            [[v, v] for v in (5, 10, 20, 40, 80, 160, 320, 640)],
        ),
        _spec(
            "DS4",
            [0.25, 0.25, 0.25, 0.25],
            [[1, 4], [2, 2], [4, 1], [2, 2]],
            [[100, 1000], [100, 100], [100, 1000], [100, 100]],
        ),
        _spec("DS-CBASP", [1 / 3, 1 / 3, 1 / 3], _CBASP_MU, _CBASP_SIGMA2),
        _spec(
            "DS21",
            [0.25] * 4,
            [[20, 10, 10]] * 4,
            [[50, 50, 50]] * 4,
        ),
        _spec(
            "DS22",
            [0.25] * 4,
            [[20, 19, 15]] + [[20, 10, 10]] * 3,
            [[50, 50, 50]] * 4,
        ),
        _spec(
            "DS23",
            [0.05, 0.05, 0.3, 0.3, 0.3],
            [[20, 15, 15]] * 5,
            [[50, 50, 50]] * 5,
        ),
        _spec(
            "DS24",
            [0.125] * 8,
            [[20, 15, 15]] + [[20, 10, 10]] * 7,
            [[50, 50, 50]] * 8,
        ),
        _spec("DS2-CBASP", [0.2, 0.4, 0.4], _CBASP_MU, _CBASP_SIGMA2),
    )
}


def dataset_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def builtin_dataset(name: str) -> DatasetSpec:
    """Look up a benchmark world by name.

    Raises ``ValueError`` listing the valid names when the lookup fails.
    """
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown dataset {name!r}; valid names: {', '.join(_REGISTRY)}"
        ) from None
