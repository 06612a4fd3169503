#!/usr/bin/env python3
import glob
import json
import subprocess
import sys
import tempfile

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

root, cli = sys.argv[1], sys.argv[2]
schemas, registry = {}, Registry()
for f in glob.glob(f"{root}/schemas/*.json"):
    s = json.load(open(f))
    Draft202012Validator.check_schema(s)
    schemas[f.rsplit("/", 1)[-1]] = s
    registry = registry.with_resource(s["$id"], Resource.from_contents(s))


def errors(name, doc):
    return list(Draft202012Validator(schemas[name], registry=registry).iter_errors(doc))


failed = 0
invalid = {"empty.json", "bad_nested.json"}
for f in sorted(glob.glob(f"{root}/tests/configs/*.json")):
    name = f.rsplit("/", 1)[-1]
    bad = bool(errors("experiment.json", json.load(open(f))))
    if bad != (name in invalid):
        print(f"{name}: schema verdict {'invalid' if bad else 'valid'} is wrong")
        failed += 1

hk = subprocess.run([cli, f"{root}/tests/configs/flat_hk.json"], capture_output=True, text=True, check=True).stdout
for e in errors("hk_record.json", json.loads(hk)):
    print("hk-verify output:", e.message)
    failed += 1
with tempfile.NamedTemporaryFile("w", suffix=".json") as cfg:
    json.dump({"kind": "flow-run", "flow": "eta2", "n": 2, "ensemble": 2, "s_span": [0.0, 0.05], "return_check": True}, cfg)
    cfg.flush()
    flow = subprocess.run([cli, cfg.name], capture_output=True, text=True, check=True).stdout
for line in flow.splitlines():
    for e in errors("trajectory.json", json.loads(line)):
        print("flow-run output:", e.message)
        failed += 1

print("schemas:", "FAIL" if failed else "PASS")
sys.exit(1 if failed else 0)
