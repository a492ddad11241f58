from concurrent.futures import ProcessPoolExecutor


def ordered_map(fn, items, jobs=1):
    """``map`` that optionally fans out over processes; output order follows ``items``."""
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
