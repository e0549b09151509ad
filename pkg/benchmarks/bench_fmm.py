"""Time the compiled and pure-Python inpainting kernels on the same input.

    python3 benchmarks/bench_fmm.py [--size 200] [--coverage 0.03] [--repeat 3]

Both backends must return identical pixels; the script checks that before
printing timings.
"""

import argparse
import time

import numpy as np

from sealrestore.inpaint import available_backends, inpaint_fmm
from sealrestore.seal_mask import dilate


def make_case(size, coverage, seed):
    rng = np.random.default_rng(seed)
    h, w = size, int(size * 1.4)
    img = rng.integers(0, 256, (h, w, 3), dtype=np.uint8)
    mask = np.zeros((h, w), dtype=bool)
    # grow blobs from seeds until the target coverage is reached
    while mask.mean() < coverage:
        y, x = rng.integers(0, h), rng.integers(0, w)
        r = int(rng.integers(2, 8))
        mask[max(y - r, 0):y + r, max(x - r, 0):x + r] = True
    return img, dilate(mask, 3, 1)


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=200, help="image height; width is 1.4x")
    ap.add_argument("--coverage", type=float, default=0.03)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    img, mask = make_case(args.size, args.coverage, args.seed)
    print(f"image {img.shape[1]}x{img.shape[0]}, mask coverage {mask.mean():.3%}")
    results = {}
    for name in available_backends():
        secs, out = best_of(lambda: inpaint_fmm(img, mask, 3.0, backend=name), args.repeat)
        results[name] = (secs, out)
        print(f"{name:>9}: {secs * 1000:9.1f} ms")
    if len(results) == 2:
        (tc, oc), (tp, op) = results["compiled"], results["python"]
        assert np.array_equal(oc, op), "backends disagree"
        print(f"identical output; compiled is {tp / tc:.0f}x faster")
    else:
        print("compiled backend not built; only the Python kernel was timed")


if __name__ == "__main__":
    main()
