def double(x):
    """Return twice the value."""
    result = x + x
    if result == 0:
        return 0
    return result
