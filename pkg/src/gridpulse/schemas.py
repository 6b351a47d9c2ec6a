"""JSON Schemas for artifacts and API payloads.

The CLI writes artifacts that the service serves unmodified, so both
sides validate against the same definitions (tests enforce this).
"""

from __future__ import annotations

ZIP_PATTERN = "^[0-9]{5}$"
COLORS = ["red", "orange", "yellow", "green", "blue"]
BOROUGHS = ["Bronx", "Brooklyn", "Manhattan", "Queens", "StatenIsland"]

RANKINGS_SCHEMA = {
    "type": "object",
    "required": ["count", "rankings"],
    "properties": {
        "count": {"type": "integer", "minimum": 1},
        "rankings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["zip", "score", "zcr", "color"],
                "properties": {
                    "zip": {"type": "string", "pattern": ZIP_PATTERN},
                    "score": {"type": "number", "minimum": 0, "maximum": 7},
                    "zcr": {"type": "integer", "minimum": 1},
                    "color": {"enum": COLORS},
                    "imputed": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}

CLUSTERS_SCHEMA = {
    "type": "object",
    "required": ["k", "assignment", "centroids"],
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "assignment": {
            "type": "object",
            "patternProperties": {ZIP_PATTERN: {"type": "integer", "minimum": 0}},
            "additionalProperties": False,
        },
        "centroids": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
}

TRANSITION_SCHEMA = {
    "type": "object",
    "required": ["k", "seed", "samples", "matrix"],
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "seed": {"type": ["integer", "null"]},
        "samples": {"type": ["integer", "null"]},
        "matrix": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number", "minimum": 0}},
        },
    },
}

EDGE_SCHEMA = {
    "type": "object",
    "required": ["from_cluster", "to_cluster", "weight"],
    "properties": {
        "from_cluster": {"type": "integer", "minimum": 0},
        "to_cluster": {"type": "integer", "minimum": 0},
        "weight": {"type": "number", "minimum": 0},
    },
}

PREDICTION_SCHEMA = {
    "type": "object",
    "required": ["clusters", "o_now", "o_predicted", "top_edges"],
    "properties": {
        "clusters": CLUSTERS_SCHEMA,
        "o_now": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "o_predicted": {"type": "array", "items": {"type": "number"}},
        "top_edges": {"type": "array", "items": EDGE_SCHEMA, "maxItems": 100},
    },
}

CURRENT_OUTAGE_SCHEMA = {
    "type": "object",
    "required": [
        "internal_id", "source_id", "address", "zip", "borough",
        "reported_at", "zcr", "osr", "color",
    ],
    "properties": {
        "internal_id": {"type": "integer"},
        "source_id": {"type": "string", "minLength": 1},
        "address": {"type": "string"},
        "zip": {"type": "string", "pattern": ZIP_PATTERN},
        "borough": {"enum": BOROUGHS},
        "cause": {"type": ["string", "null"]},
        "reported_at": {"type": "string"},
        "zcr": {"type": "integer", "minimum": 1},
        "osr": {"type": "integer", "minimum": 1},
        "color": {"enum": COLORS},
    },
}

CURRENT_PAYLOAD_SCHEMA = {
    "type": "object",
    "required": ["outages"],
    "properties": {"outages": {"type": "array", "items": CURRENT_OUTAGE_SCHEMA}},
}

HISTORICAL_PAYLOAD_SCHEMA = {
    "type": "object",
    "required": ["page", "page_size", "rows"],
    "properties": {
        "page": {"type": "integer", "minimum": 1},
        "page_size": {"type": "integer", "minimum": 1},
        "rows": {"type": "array", "items": {"type": "object"}},
    },
}

PER_CAPITA_SCHEMA = {
    "type": "object",
    "required": ["boroughs"],
    "properties": {
        "boroughs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["borough", "count", "per_capita"],
                "properties": {
                    "borough": {"enum": BOROUGHS},
                    "count": {"type": "integer", "minimum": 0},
                    "per_capita": {"type": "number", "minimum": 0},
                },
            },
        }
    },
}

TREND_SCHEMA = {
    "type": "object",
    "required": ["x", "slope", "intercept", "r", "n", "points"],
    "properties": {
        "x": {"enum": ["income", "nonwhite"]},
        "slope": {"type": "number"},
        "intercept": {"type": "number"},
        "r": {"type": "number", "minimum": -1, "maximum": 1},
        "n": {"type": "integer", "minimum": 2},
        "points": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
    },
}

CAUSES_SCHEMA = {
    "type": "object",
    "required": ["causes"],
    "properties": {
        "causes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["cause", "count"],
                "properties": {
                    "cause": {"type": "string", "minLength": 1},
                    "count": {"type": "integer", "minimum": 1},
                },
            },
        }
    },
}

TRANSITION_BINS_SCHEMA = {
    "type": "object",
    "required": ["bin_upper_limits", "matrix", "pairs"],
    "properties": {
        "bin_upper_limits": {
            "type": "array",
            "items": {"type": ["integer", "null"]},
            "minItems": 7,
            "maxItems": 7,
        },
        "matrix": {
            "type": "array",
            "minItems": 7,
            "maxItems": 7,
            "items": {
                "type": "array",
                "minItems": 7,
                "maxItems": 7,
                "items": {"type": "integer", "minimum": 0},
            },
        },
        "pairs": {"type": "integer", "minimum": 1},
    },
}

DEMOGRAPHICS_SCHEMA = {
    "type": "object",
    "required": ["features", "zips"],
    "properties": {
        "features": {"type": "array", "items": {"type": "string"}, "minItems": 7, "maxItems": 7},
        "zips": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["zip", "score", "zcr", "color", "features", "features_normalized"],
                "properties": {
                    "zip": {"type": "string", "pattern": ZIP_PATTERN},
                    "score": {"type": "number", "minimum": 0, "maximum": 7},
                    "zcr": {"type": "integer", "minimum": 1},
                    "color": {"enum": COLORS},
                    "features": {"type": "object"},
                    "features_normalized": {"type": "object"},
                    "centroid_lat": {"type": "number"},
                    "centroid_lon": {"type": "number"},
                    "borough": {"enum": BOROUGHS},
                    "population": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["poll_interval_minutes", "step_hours", "clusters", "samples"],
    "properties": {
        "poll_interval_minutes": {"type": "integer", "minimum": 1},
        "step_hours": {"type": "integer", "minimum": 1},
        "clusters": {"type": "integer", "minimum": 1},
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
    },
}

ARTIFACT_SCHEMAS = {
    "rankings": RANKINGS_SCHEMA,
    "clusters": CLUSTERS_SCHEMA,
    "transition": TRANSITION_SCHEMA,
    "prediction": PREDICTION_SCHEMA,
}
