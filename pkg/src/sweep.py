# -*- coding: utf-8 -*-
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Sequence, TypeVar

from tqdm import tqdm

from .logger import logger

P = TypeVar("P")
R = TypeVar("R")


def run_grid(
        func: Callable[[P], R],
        points: Sequence[P],
        workers: int = 1,
        desc: str = "sweep",
        show_progress: bool = False
) -> list[R]:
    """
    Evaluate ``func`` on every grid point and return the results in input order.

    Points are independent; with ``workers`` > 1 they run on a thread pool, and the
    results are assembled by index so the output never depends on completion order.
    """
    results: list[R | None] = [None] * len(points)
    logger.info(f"{desc}: {len(points)} grid points on {max(1, workers)} worker(s)")

    with tqdm(total=len(points), desc=desc, ncols=100, disable=not show_progress) as bar:
        if workers <= 1:
            for index, point in enumerate(points):
                results[index] = func(point)
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                futures = {executor.submit(func, point): index for index, point in enumerate(points)}
                for future in as_completed(futures):
                    results[futures[future]] = future.result()
                    bar.update(1)

    return results
