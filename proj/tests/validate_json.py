"""validate_json.py SCHEMA DOC [DOC ...]: exit 0 iff every document validates."""

import json
import sys

import jsonschema

schema = json.load(open(sys.argv[1]))
bad = 0
for path in sys.argv[2:]:
    try:
        jsonschema.validate(json.load(open(path)), schema)
    except jsonschema.ValidationError as e:
        print(f"{path}: {e.message}", file=sys.stderr)
        bad += 1
sys.exit(1 if bad else 0)
