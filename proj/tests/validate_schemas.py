"""Validate JSON emitted by the CLI and the serializers against schemas/."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def load(schemas: Path, name: str) -> jsonschema.protocols.Validator:
    schema = json.loads((schemas / f"{name}.schema.json").read_text())
    cls = jsonschema.validators.validator_for(schema)
    cls.check_schema(schema)
    return cls(schema)


def run(cmd: list[str], expect: int) -> dict:
    proc = subprocess.run(cmd, capture_output=True, text=True, check=False)
    if proc.returncode != expect:
        raise SystemExit(f"{' '.join(cmd)}: exit {proc.returncode}, expected {expect}\n{proc.stderr}")
    return json.loads(proc.stdout)


def main() -> int:
    cli, samples, schemas = sys.argv[1], sys.argv[2], Path(sys.argv[3])
    validators = {n: load(schemas, n) for n in ("diffpoly", "frame_field", "derive", "verify", "check_curve")}

    cases = [
        ("derive", [cli, "derive", "--k", "2", "--dim", "5", "--format", "json"], 0),
        ("derive", [cli, "derive", "--k", "3", "--format", "json"], 0),
        ("verify", [cli, "verify", "--format", "json"], 0),
        ("verify", [cli, "verify", "--target", "Thm6", "--kmax", "3", "--omit-relation", "--format", "json"], 1),
        ("check_curve", [cli, "check-curve", "--K", "1", "--kappa", "k1 = constant value=1", "--k", "2..6",
                         "--format", "json"], 0),
        ("check_curve", [cli, "check-curve", "--K", "-1", "--kappa", "k1 = constant value=1", "--k", "2",
                         "--format", "json"], 3),
    ]
    checked = 0
    for schema, cmd, expect in cases:
        validators[schema].validate(run(cmd, expect))
        checked += 1

    out = subprocess.run([samples], capture_output=True, text=True, check=True).stdout
    for line in out.splitlines():
        kind, doc = line.split(" ", 1)
        validators[kind].validate(json.loads(doc))
        checked += 1

    print(f"{checked} documents valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
