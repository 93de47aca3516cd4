from sc import clamp, middle_item
from slib import env_flag, dump_sorted
from plib import fetch_status, load_settings
from cls import Counter
from filemod import is_retryable, scaled_budget
from proj import tidy_name, count_words


def test_clamp():
    assert clamp(5, 0, 3) == 3
    assert clamp(-1, 0, 3) == 0
    assert clamp(2, 0, 3) == 2


def test_middle_item():
    assert middle_item([1, 2, 3]) == 2


def test_env_flag():
    assert env_flag("CTXEVAL_SURELY_UNSET") is False


def test_dump_sorted():
    assert dump_sorted({"b": 1, "a": 2}).startswith("{")


def test_fetch_status():
    assert fetch_status("http://127.0.0.1:1") >= 0


def test_load_settings():
    assert load_settings("a: 1") == {"a": 1}


def test_counter_bump():
    counter = Counter(1)
    assert counter.bump(2) == 3
    assert counter.bump(-2) == 5


def test_counter_bump_twice():
    counter = Counter(0)
    assert counter.bump_twice(1) == 2


def test_is_retryable():
    assert is_retryable(0) is True
    assert is_retryable(9) is False


def test_scaled_budget():
    assert scaled_budget(0) >= 1


def test_tidy_name():
    assert tidy_name("  A   b ") == "a b"


def test_count_words():
    assert count_words("one two three") == 3
