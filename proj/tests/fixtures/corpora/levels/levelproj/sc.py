def clamp(value, low, high):
    """Clamp value into the inclusive range [low, high]."""
    if value < low:
        return low
    if value > high:
        return high
    return value


def middle_item(items):
    """Return the middle element of a non-empty list."""
    if not items:
        raise ValueError("empty sequence")
    mid = len(items) // 2
    return items[mid]
