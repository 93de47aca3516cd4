import requests
import yaml


def fetch_status(url):
    """Return the HTTP status code of a GET request to the given url."""
    resp = requests.get(url, timeout=5)
    code = resp.status_code
    if code >= 500:
        return 0
    return code


def load_settings(text):
    """Parse a YAML settings document into a dictionary."""
    data = yaml.safe_load(text)
    if data is None:
        return {}
    return dict(data)
