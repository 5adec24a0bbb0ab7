import os
import subprocess
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))
sys.path.insert(0, os.path.dirname(__file__))

from smalldev.simulate import IncrementLaw, walk_max_samples  # noqa: E402

GAUSSIAN_BATCH_SEED = 31415
GAUSSIAN_BATCH_N = 10_000
GAUSSIAN_BATCH_SAMPLES = 100_000


@pytest.fixture(scope="session")
def gaussian_walk_batch():
    """10^5 draws of M_n for standard Gaussian increments at n = 10^4.

    Shared between the distributional tests and the acceptance suite; the
    batch is deterministic in (seed, samples).
    """
    m = walk_max_samples(IncrementLaw("gaussian"), GAUSSIAN_BATCH_N,
                         GAUSSIAN_BATCH_SAMPLES, seed=GAUSSIAN_BATCH_SEED,
                         workers=1)
    return {"m": m, "n": GAUSSIAN_BATCH_N, "seed": GAUSSIAN_BATCH_SEED,
            "samples": GAUSSIAN_BATCH_SAMPLES}


def run_cli(*args, expect_code=0):
    """Run the CLI in a subprocess and return (stdout_bytes, stderr_text)."""
    env = dict(os.environ)
    src = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir, "src"))
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    proc = subprocess.run([sys.executable, "-m", "smalldev", *args],
                          capture_output=True, env=env)
    assert proc.returncode == expect_code, (
        f"exit {proc.returncode} != {expect_code}; stderr: {proc.stderr.decode()}")
    return proc.stdout, proc.stderr.decode()
