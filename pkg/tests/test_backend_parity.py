"""End-to-end equivalence of the compiled and pure-Python backends.

A small simulation is run in a subprocess with the fallback forced; its
series CSV must be byte-identical to the compiled run (same arithmetic,
different execution engine).
"""
import os
import subprocess
import sys
from pathlib import Path

import pytest

from pmetraj import _backend
from pmetraj.csvio import emit_series_csv
from pmetraj.harness import ExperimentConfig, run_simulation

pytestmark = pytest.mark.skipif(_backend.BACKEND != "compiled",
                                reason="needs the compiled backend to compare against")

_SCRIPT = """
import sys
from pmetraj import _backend
from pmetraj.csvio import emit_series_csv
from pmetraj.harness import ExperimentConfig, run_simulation

assert _backend.BACKEND == "python", _backend.BACKEND
cfg = ExperimentConfig(problem={problem!r}, case={case}, m={m}, M={M},
                       tau={tau}, T={T}, snapshot_times=(0.0, {T}))
emit_series_csv(run_simulation(cfg), sys.argv[1])
"""


@pytest.mark.parametrize("problem,case,m,M,tau,T", [
    ("smooth", 1, 5 / 3, 24, 1e-2, 0.04),
    ("smooth", 2, 2.0, 24, 1e-2, 0.04),
    ("barenblatt", 1, 3.0, 32, 5e-3, 0.05),
])
def test_forced_fallback_reproduces_compiled_csv(tmp_path, problem, case, m, M, tau, T):
    cfg = ExperimentConfig(problem=problem, case=case, m=m, M=M, tau=tau, T=T,
                           snapshot_times=(0.0, T))
    compiled_csv = tmp_path / "compiled.csv"
    emit_series_csv(run_simulation(cfg), compiled_csv)

    fallback_csv = tmp_path / "fallback.csv"
    env = dict(os.environ, PMETRAJ_PURE="1")
    script = _SCRIPT.format(problem=problem, case=case, m=m, M=M, tau=tau, T=T)
    subprocess.run([sys.executable, "-c", script, str(fallback_csv)],
                   check=True, env=env, cwd=tmp_path)

    assert Path(fallback_csv).read_bytes() == Path(compiled_csv).read_bytes()
