"""Checks the varmp exit-code contract on small inputs."""
import pathlib
import subprocess
import sys
import tempfile

varmp, root = sys.argv[1], pathlib.Path(sys.argv[2])
models = root / "models"
data = root / "tests" / "data"

cases = [
    (["check", models / "cor1_pass.model"], 0),
    (["check", models / "cor1_q1_6.model"], 2),
    (["check", models / "cor1_gamma4_2_5.model"], 2),
    (["check", models / "cor1_theta_low.model"], 2),
    (["check", models / "cor1_theta_high.model"], 2),
    (["check", data / "unknown_key.model"], 3),
    (["check", data / "missing.model"], 3),
    (["eigen", "--p", "2", "--mesh", "interval:50"], 0),
    (["eigen", "--p", "2", "--mesh", "triangle:9"], 3),
    (["eigen", "--p", "0.5", "--mesh", "interval:50"], 3),
    (["solve", models / "cubic1d.model", "--mesh", "interval:0"], 3),
    (["solve", models / "cubic1d.model", "--mesh", "interval:60", "--max-iters", "2"], 4),
    (["geometry", data / "sublinear.model", "--mesh", "interval:60"], 5),
    (["solve", models / "cubic1d.model", "--mesh", "interval:60", "--tol", "-1"], 3),
    (["frobnicate"], 3),
]

failures = 0
with tempfile.TemporaryDirectory() as tmp:
    for args, expected in cases:
        argv = [varmp, *map(str, args), "--quiet"] if args[0] != "frobnicate" else [varmp, *args]
        proc = subprocess.run(argv, capture_output=True, text=True, cwd=tmp)
        label = " ".join(map(str, args))
        if proc.returncode == expected:
            print(f"ok    {label} -> {expected}")
        else:
            failures += 1
            print(f"FAIL  {label}: exit {proc.returncode}, expected {expected}\n{proc.stderr.strip()}")

sys.exit(1 if failures else 0)
