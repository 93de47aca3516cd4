MAX_RETRIES = 3


def is_retryable(err_count):
    """Decide whether another retry attempt is allowed."""
    if err_count < 0:
        raise ValueError("negative error count")
    remaining = MAX_RETRIES - err_count
    return remaining > 0


def scaled_budget(load):
    """Compute the retry budget scaled by the current load factor."""
    budget = _scale(MAX_RETRIES, load)
    if budget < 1:
        return 1
    return budget


def _scale(base, load):
    return int(base / (load + 1))
