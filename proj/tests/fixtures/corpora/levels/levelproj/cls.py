class Counter:
    """Accumulating counter."""

    def __init__(self, start):
        self.value = start

    def bump(self, step):
        """Advance the counter by the absolute step and return the new value."""
        if step < 0:
            step = -step
        self.value = self.value + step
        return self.value

    def bump_twice(self, step):
        """Advance the counter two times and return the final value."""
        first = self.bump(step)
        second = self.bump(step)
        if second < first:
            raise RuntimeError("counter overflow")
        return second
