"""Published JSON shapes for CLI output.

Every subcommand that reports JSON emits the report envelope; family and
certificate payloads embedded in results follow their own schemas.  Tests
validate emitted reports against these objects, and downstream tooling may
rely on them.
"""

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "report envelope",
    "type": "object",
    "required": ["command", "inputs", "results", "timings", "seed"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object"},
        "results": {"type": "object"},
        "timings": {
            "type": "object",
            "required": ["totalSeconds"],
            "properties": {"totalSeconds": {"type": "number"}},
        },
        "seed": {"type": ["integer", "null"]},
    },
}

FAMILY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "set family",
    "type": "object",
    "required": ["n", "m", "sets"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 0},
        "sets": {
            "type": "array",
            "items": {"type": "array",
                      "items": {"type": "integer", "minimum": 0}},
        },
    },
}

CERTIFICATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "sunflower certificate",
    "type": "object",
    "required": ["core", "petals"],
    "properties": {
        "core": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "petals": {
            "type": "array",
            "minItems": 2,
            "items": {"type": "array",
                      "items": {"type": "integer", "minimum": 0}},
        },
    },
}

TRACE_ROW_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "extraction trace row",
    "type": "object",
    "required": ["p", "r", "B", "Xprime", "sizeT", "cumulative"],
    "properties": {
        "p": {"type": "integer", "minimum": 1},
        "r": {"type": "integer", "minimum": 0},
        "B": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "Xprime": {"type": "array",
                   "items": {"type": "integer", "minimum": 0}},
        "sizeT": {"type": "integer", "minimum": 1},
        "cumulative": {"type": "integer", "minimum": 1},
    },
}

GAMMA_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "spreadness report",
    "type": "object",
    "required": ["holds", "witness", "ratio"],
    "properties": {
        "holds": {"type": "boolean"},
        "witness": {"type": ["array", "null"],
                    "items": {"type": "integer", "minimum": 0}},
        "ratio": {"type": "array", "minItems": 2, "maxItems": 2,
                  "items": {"type": "integer"}},
    },
}
