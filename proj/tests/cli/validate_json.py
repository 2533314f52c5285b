"""Runs each varmp subcommand with --json and validates the output against its schema."""
import json
import pathlib
import subprocess
import sys

import jsonschema

varmp, root = sys.argv[1], pathlib.Path(sys.argv[2])
models = root / "models"

runs = [
    ("check", [str(models / "cor1_pass.model")], 0),
    ("check", [str(models / "cor1_q1_6.model")], 2),
    ("eigen", ["--p", "2", "--mesh", "interval:100", "--modes", "3"], 0),
    ("geometry", [str(models / "cor1_pass.model"), "--mesh", "interval:100"], 0),
    ("solve", [str(models / "cubic1d.model"), "--mesh", "interval:100"], 0),
    ("multiplicity", [str(models / "cubic1d.model"), "--mesh", "interval:100", "--count", "2"], 0),
    ("demo", [], 0),
]

failures = 0
for command, args, expected in runs:
    proc = subprocess.run([varmp, command, *args, "--json"], capture_output=True, text=True)
    schema = json.loads((root / "schema" / f"{command}.schema.json").read_text())
    label = " ".join([command, *args])
    try:
        if proc.returncode != expected:
            raise AssertionError(f"exit {proc.returncode}, expected {expected}: {proc.stderr.strip()}")
        jsonschema.validate(json.loads(proc.stdout), schema)
        print(f"ok    {label}")
    except (AssertionError, json.JSONDecodeError, jsonschema.ValidationError) as err:
        failures += 1
        print(f"FAIL  {label}: {err}")

sys.exit(1 if failures else 0)
