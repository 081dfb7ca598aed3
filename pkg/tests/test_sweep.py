# -*- coding: utf-8 -*-
import time

from src.sweep import run_grid


def _slow_square(x: int) -> int:
    # later points finish first
    time.sleep(0.002 * (10 - x))
    return x * x


def test_sequential_order():
    assert run_grid(_slow_square, list(range(10))) == [x * x for x in range(10)]


def test_parallel_results_keep_input_order():
    assert run_grid(_slow_square, list(range(10)), workers=4) == [x * x for x in range(10)]


def test_empty_grid():
    assert run_grid(_slow_square, [], workers=3) == []


def test_progress_bar(capsys):
    run_grid(_slow_square, [1, 2, 3], desc="demo grid", show_progress=True)
    assert "demo grid" in capsys.readouterr().err
