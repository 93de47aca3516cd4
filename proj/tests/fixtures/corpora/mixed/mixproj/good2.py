def triple(x):
    """Return three times the value."""
    result = x * 3
    if result == 0:
        return 0
    return result
