import json
import os


def env_flag(name):
    """Return True when the named environment variable holds a truthy string."""
    raw = os.environ.get(name, "")
    if not raw:
        return False
    return raw.lower() in ("1", "true", "yes")


def dump_sorted(payload):
    """Serialize a mapping to JSON text with sorted keys."""
    if not isinstance(payload, dict):
        raise TypeError("mapping required")
    text = json.dumps(payload, sort_keys=True)
    return text + "\n"
