from calc import add, mul, sign


def test_add():
    assert add(2, 3) == 5
    assert add(-1, 1) == 0
    assert add(10, -4) == 6


def test_mul():
    assert mul(3, 4) == 12
    assert mul(-2, 5) == -10
    assert mul(0, 7) == 0


def test_sign():
    assert sign(9) == 1
    assert sign(-9) == -1
    assert sign(0) == 0
