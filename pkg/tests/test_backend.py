import json
import os
import subprocess
import sys

import numpy as np

import sensireach
from sensireach._jit import python_impl
from sensireach.models import unicycle_f

SCRIPT = """
import json, numpy as np, sensireach
from sensireach.pipeline import run_algorithm1
from sensireach.problems import riccati_problem, linear_problem, ROTATION_A
from sensireach.sensitivity import flow_with_second_sensitivity
from sensireach.models import make_unicycle
from sensireach.integrators import IntegratorConfig
out = {"backend": sensireach.BACKEND}
for name, prob in (("riccati", riccati_problem()), ("rotation", linear_problem(ROTATION_A))):
    r = run_algorithm1(prob, 2)
    out[name] = [r.over_approx.lo.tolist(), r.over_approx.hi.tolist()]
res = flow_with_second_sensitivity(make_unicycle(), 0, 10, np.array([0.3, 0.6, 0.5, 0.01, -0.02, 0.02]), IntegratorConfig(steps=200))
out["sxx"] = res.sxx.tolist()
res = flow_with_second_sensitivity(make_unicycle(), 0, 10, np.array([0.3, 0.6, 0.5, 0.01, -0.02, 0.02]), IntegratorConfig("rk45"))
out["sxx45"] = res.sxx.tolist()
print(json.dumps(out))
"""


def run_backend(disable):
    env = dict(os.environ)
    env.pop("NUMBA_DISABLE_JIT", None)
    env["SENSIREACH_DISABLE_NUMBA"] = "1" if disable else "0"
    proc = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def test_numpy_fallback_matches_numba():
    jit, plain = run_backend(False), run_backend(True)
    assert plain["backend"] == "numpy"
    assert jit["backend"] == ("numba" if sensireach.BACKEND == "numba" else "numpy")
    for key in ("riccati", "rotation", "sxx", "sxx45"):
        np.testing.assert_allclose(np.array(jit[key]), np.array(plain[key]), rtol=1e-12, atol=1e-12)


def test_python_impl_is_callable():
    out = python_impl(unicycle_f)(0.0, np.zeros(6), np.array([0.25, 0.3]))
    np.testing.assert_allclose(out, [0.25, 0, 0.3, 0, 0, 0])
