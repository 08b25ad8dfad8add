import numpy as np
import pytest

from wellopt.objectives import kernels
from wellopt.objectives.scenarios import load_case
from wellopt.objectives.simulator import simulate

pytestmark = pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")


def test_compiled_is_default():
    assert kernels.BACKEND == "compiled"


@pytest.mark.parametrize("case", ["fivespot_15_homog", "joint_4", "placement_6"])
def test_backends_agree(case):
    c = load_case(f"builtin:{case}")
    a, sa = simulate(c.model, c.wells, backend="compiled", full_output=True)
    b, sb = simulate(c.model, c.wells, backend="python", full_output=True)
    np.testing.assert_allclose(sa.water_saturation, sb.water_saturation, rtol=0, atol=1e-10)
    for name in ("q_op", "q_wp", "q_wi"):
        np.testing.assert_allclose(getattr(a, name), getattr(b, name), rtol=1e-9, atol=1e-9)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_kernel("fortran")
