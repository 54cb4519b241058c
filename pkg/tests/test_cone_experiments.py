"""Report structure and basic sanity of the packet-ensemble experiments.

Exponent accuracy at the production lattice size is covered by the
acceptance tests; these runs use tiny ensembles and only check structure,
determinism, and coarse monotonicity.
"""

import numpy as np
import pytest

from diraclab.cone_experiments import (
    SIGN_PAIRS,
    bilinear_product_experiment,
    l4_cone_experiment,
)
from diraclab.grid import Grid2D
from diraclab.spacetime import SpacetimeLattice

ROW_COLUMNS = {"experiment", "sign_pair", "param_name", "param_value",
               "trial_max_ratio", "fitted_slope", "slope_stderr"}


@pytest.fixture(scope="module")
def lat():
    return SpacetimeLattice(Grid2D(32), 32)


class TestL4Cone:
    def test_report_shape(self, lat):
        rep = l4_cone_experiment(lat, lams=(4, 5, 6, 7), Ls=(1, 2, 3, 4),
                                 mus=(2, 3, 4, 5), trials=2, seed=0)
        assert len(rep.rows) == 12
        assert ROW_COLUMNS <= set(rep.rows[0])
        for name in ("mu", "lam", "L"):
            assert np.isfinite(rep.fitted[f"slope_{name}"])
        assert all(r["trial_max_ratio"] > 0 for r in rep.rows)

    def test_deterministic(self, lat):
        a = l4_cone_experiment(lat, lams=(4, 5, 6, 7), Ls=(1, 2, 3, 4),
                               mus=(2, 3, 4, 5), trials=2, seed=1)
        b = l4_cone_experiment(lat, lams=(4, 5, 6, 7), Ls=(1, 2, 3, 4),
                               mus=(2, 3, 4, 5), trials=2, seed=1)
        assert a.rows == b.rows

    def test_requires_enough_points(self, lat):
        with pytest.raises(ValueError):
            l4_cone_experiment(lat, lams=(4, 5), Ls=(1, 2, 3, 4),
                               mus=(2, 3, 4, 5), trials=1, seed=0)


class TestBilinear:
    def test_all_sign_pairs_reported(self, lat):
        rep = bilinear_product_experiment(lat, s=0.5, b=0.55,
                                          mus=(3, 4, 5, 6), trials=2, seed=0)
        labels = {r["sign_pair"] for r in rep.rows}
        assert labels == {"++", "+-", "-+", "--"}
        assert len(rep.rows) == 4 * len(SIGN_PAIRS)
        for s1, s2 in SIGN_PAIRS:
            lab = f"{'+' if s1 > 0 else '-'}{'+' if s2 > 0 else '-'}"
            assert np.isfinite(rep.fitted[f"slope_mu_{lab}"])
        assert rep.fitted["predicted_slope"] == pytest.approx(0.375 - 0.5)

    def test_explicit_lams_must_pair(self, lat):
        with pytest.raises(ValueError):
            bilinear_product_experiment(lat, s=0.5, b=0.55, mus=(3, 4, 5, 6),
                                        lams=(8, 9), trials=1, seed=0)
