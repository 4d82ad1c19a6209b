from concurrent.futures import ProcessPoolExecutor


def pmap(fn, items, workers=1):
    """Ordered map; results come back in input order whatever the schedule."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
