import os
import subprocess
import sys


def _backend_with(env_value):
    env = dict(os.environ)
    env["Z3FLOW_KERNELS"] = env_value
    out = subprocess.run([sys.executable, "-c", "import z3flow.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_environment_forces_the_python_fallback():
    assert _backend_with("python") == "python"


def test_default_prefers_compiled_when_available():
    from z3flow import kernels
    want = "compiled" if kernels.have_compiled() else "python"
    assert _backend_with("") == want
