from good1 import double
from good2 import triple


def test_double():
    assert double(2) == 4


def test_triple():
    assert triple(2) == 6
