"""Validates the shipped configs and a generated report against docs/schemas."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

root = pathlib.Path(sys.argv[1])
binary = sys.argv[2]
schemas = {p.name: json.loads(p.read_text()) for p in (root / "docs" / "schemas").glob("*.json")}
registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())


def validator(name):
    cls = jsonschema.validators.validator_for(schemas[name])
    cls.check_schema(schemas[name])
    return cls(schemas[name], registry=registry)


config = validator("config.schema.json")
for path in sorted((root / "docs" / "configs").glob("*.json")):
    config.validate(json.loads(path.read_text()))
    print("valid config:", path.name)

bad = {"potential": {"terms": [{"type": "axis_charge", "position": 0, "charge": -1}]}, "field": {"B": 1}}
assert not config.is_valid(bad), "negative charge must be rejected"

with tempfile.TemporaryDirectory() as tmp:
    cfg = pathlib.Path(tmp) / "c.json"
    cfg.write_text(json.dumps({"potential": {"terms": [{"type": "axis_charge", "position": 0, "charge": 1}]},
                               "field": {"B": 1}, "m_max": 4, "resolution": -1}))
    out = pathlib.Path(tmp) / "out"
    code = subprocess.call([binary, "verify", "--config", str(cfg), "--out", str(out)])
    assert code == 0, code
    validator("report.schema.json").validate(json.loads((out / "report.json").read_text()))
    run = json.loads((out / "run.json").read_text())
    config.validate(run)
    print("valid report and run.json")
