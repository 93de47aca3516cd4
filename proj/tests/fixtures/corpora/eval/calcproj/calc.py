def add(a, b):
    """Return the sum of the two numbers."""
    total = a + b
    if total == 0:
        return 0
    return total


def mul(a, b):
    """Return the product of the two numbers."""
    result = a * b
    if result == 0:
        return 0
    return result


def sign(x):
    """Return -1, 0, or 1 according to the sign of x."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0
