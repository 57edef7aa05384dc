"""Unsharp-mask sharpening with a pluggable 8x8 multiplier, plus PSNR/SSIM.

Images are ``uint8`` arrays, ``(H, W)`` for gray or ``(H, W, C)`` for color;
color channels are processed and scored independently and then averaged.
Only the kernel-times-pixel products of the blur go through the multiplier;
the normalisation and the 1.5 gain are exact integer arithmetic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .netlist import Netlist
from .plan import ReductionPlan
from .simulator import product_table

GAUSSIAN_KERNEL = np.array(
    [
        [1, 4, 7, 4, 1],
        [4, 16, 26, 16, 4],
        [7, 26, 41, 26, 7],
        [4, 16, 26, 16, 4],
        [1, 4, 7, 4, 1],
    ],
    dtype=np.int64,
)
KERNEL_NORM = 273

# ``mul(pixels, coefficient)`` -> products, elementwise on int64 arrays
MulFn = Callable[[np.ndarray, int], np.ndarray]


def exact_mul(pixels: np.ndarray, coef: int) -> np.ndarray:
    return np.asarray(pixels, dtype=np.int64) * int(coef)


def zero_mul(pixels: np.ndarray, coef: int) -> np.ndarray:
    return np.zeros(np.shape(pixels), dtype=np.int64)


@dataclass(frozen=True)
class TableMul:
    """Multiplier backed by a full product table ``table[a, b]``.

    By default the pixel drives operand ``a`` and the kernel coefficient
    operand ``b``; ``pixel_first=False`` swaps them.
    """

    table: np.ndarray
    pixel_first: bool = True

    @classmethod
    def from_design(cls, design: Netlist | ReductionPlan, pixel_first: bool = True) -> "TableMul":
        return cls(product_table(design), pixel_first)

    def __call__(self, pixels: np.ndarray, coef: int) -> np.ndarray:
        px = np.asarray(pixels, dtype=np.int64)
        return self.table[px, coef] if self.pixel_first else self.table[coef, px]


# --- netpbm -----------------------------------------------------------------

class ImageFormatError(ValueError):
    pass


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_netpbm(path: str | Path) -> np.ndarray:
    """Read binary PGM (P5) or PPM (P6) with maxval 255."""
    data = Path(path).read_bytes()
    pos = 0
    fields = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if not m:
            raise ImageFormatError(f"{path}: truncated netpbm header")
        fields.append(m.group(1))
        pos = m.end()
    magic = fields[0]
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError(f"{path}: unsupported magic {magic!r} (want P5 or P6)")
    try:
        w, h, maxval = (int(x) for x in fields[1:])
    except ValueError:
        raise ImageFormatError(f"{path}: malformed header") from None
    if maxval != 255:
        raise ImageFormatError(f"{path}: maxval {maxval} unsupported (want 255)")
    pos += 1  # the single whitespace byte before the raster
    ch = 1 if magic == b"P5" else 3
    raster = data[pos:pos + w * h * ch]
    if len(raster) != w * h * ch:
        raise ImageFormatError(f"{path}: raster too short")
    arr = np.frombuffer(raster, dtype=np.uint8)
    return arr.reshape((h, w)) if ch == 1 else arr.reshape((h, w, 3))


def write_netpbm(path: str | Path, img: np.ndarray, comment: str | None = None) -> None:
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise ImageFormatError("image must be uint8")
    if img.ndim == 2:
        magic = "P5"
    elif img.ndim == 3 and img.shape[2] == 3:
        magic = "P6"
    else:
        raise ImageFormatError(f"cannot store shape {img.shape} as PGM/PPM")
    h, w = img.shape[:2]
    note = f"# {comment}\n" if comment else ""
    Path(path).write_bytes(f"{magic}\n{note}{w} {h}\n255\n".encode("ascii") + img.tobytes())


# --- pipeline ---------------------------------------------------------------

def _channels(img: np.ndarray) -> list[np.ndarray]:
    img = np.asarray(img)
    return [img] if img.ndim == 2 else [img[..., c] for c in range(img.shape[2])]


def _stack(chans: list[np.ndarray], like: np.ndarray) -> np.ndarray:
    return chans[0] if np.ndim(like) == 2 else np.stack(chans, axis=-1)


def _blur_channel(ch: np.ndarray, mul: MulFn, rounding: str) -> np.ndarray:
    h, w = ch.shape
    pad = np.pad(ch.astype(np.int64), 2, mode="edge")
    acc = np.zeros((h, w), dtype=np.int64)
    for i in range(5):
        for j in range(5):
            acc += mul(pad[i:i + h, j:j + w], int(GAUSSIAN_KERNEL[i, j]))
    if rounding == "floor":
        out = acc // KERNEL_NORM
    elif rounding == "half_up":
        out = (acc + KERNEL_NORM // 2) // KERNEL_NORM
    else:
        raise ValueError(f"unknown rounding {rounding!r}")
    return np.clip(out, 0, 255).astype(np.uint8)


def gaussian_blur(img: np.ndarray, mul: MulFn = exact_mul, rounding: str = "floor") -> np.ndarray:
    """5x5 Gaussian blur with edge replication; products via ``mul``."""
    img = np.asarray(img, dtype=np.uint8)
    if img.size == 0:
        raise ValueError("empty image")
    return _stack([_blur_channel(c, mul, rounding) for c in _channels(img)], img)


def sharpen(img: np.ndarray, mul: MulFn = exact_mul, rounding: str = "floor") -> np.ndarray:
    """``clamp(I + 3 (I - B) / 2)``, the halving truncated toward zero."""
    img = np.asarray(img, dtype=np.uint8)
    i = img.astype(np.int64)
    d = 3 * (i - gaussian_blur(img, mul, rounding).astype(np.int64))
    half = np.sign(d) * (np.abs(d) // 2)
    return np.clip(i + half, 0, 255).astype(np.uint8)


def reference_blur(img: np.ndarray) -> np.ndarray:
    """Blur with plain integer arithmetic, independent of the multiplier hook."""
    img = np.asarray(img, dtype=np.uint8)
    out = []
    for ch in _channels(img):
        h, w = ch.shape
        win = sliding_window_view(np.pad(ch.astype(np.int64), 2, mode="edge"), (5, 5))
        acc = np.einsum("hwij,ij->hw", win[:h, :w], GAUSSIAN_KERNEL)
        out.append(np.clip(acc // KERNEL_NORM, 0, 255).astype(np.uint8))
    return _stack(out, img)


def reference_sharpen(img: np.ndarray) -> np.ndarray:
    i = np.asarray(img, dtype=np.int64)
    d = 3 * (i - reference_blur(img).astype(np.int64))
    return np.clip(i + np.trunc(d / 2).astype(np.int64), 0, 255).astype(np.uint8)


# --- quality ----------------------------------------------------------------

def _same_shape(x: np.ndarray, y: np.ndarray) -> None:
    if np.shape(x) != np.shape(y):
        raise ValueError(f"image shapes differ: {np.shape(x)} vs {np.shape(y)}")


def mse(ref: np.ndarray, test: np.ndarray) -> float:
    _same_shape(ref, test)
    d = np.asarray(ref, dtype=np.int64) - np.asarray(test, dtype=np.int64)
    return float((d * d).mean())


def psnr(ref: np.ndarray, test: np.ndarray, max_value: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    e = mse(ref, test)
    if e == 0:
        return math.inf
    return 20 * math.log10(max_value / math.sqrt(e))


@dataclass(frozen=True)
class SSIMParams:
    window: int = 8
    k1: float = 0.01
    k2: float = 0.03
    data_range: float = 255.0


def _box_mean(x: np.ndarray, win: tuple[int, int]) -> np.ndarray:
    """Mean over every ``win``-sized window (stride 1) via an integral image."""
    s = np.zeros((x.shape[0] + 1, x.shape[1] + 1))
    s[1:, 1:] = x.cumsum(0).cumsum(1)
    h, w = win
    return (s[h:, w:] - s[:-h, w:] - s[h:, :-w] + s[:-h, :-w]) / (h * w)


def _ssim_channel(x: np.ndarray, y: np.ndarray, p: SSIMParams) -> float:
    x = x.astype(np.float64)
    y = y.astype(np.float64)
    win = (min(p.window, x.shape[0]), min(p.window, x.shape[1]))
    mx, my = _box_mean(x, win), _box_mean(y, win)
    # population (co)variances; clamp the tiny negatives cancellation can leave
    vx = np.maximum(_box_mean(x * x, win) - mx * mx, 0.0)
    vy = np.maximum(_box_mean(y * y, win) - my * my, 0.0)
    cxy = _box_mean(x * y, win) - mx * my
    c1 = (p.k1 * p.data_range) ** 2
    c2 = (p.k2 * p.data_range) ** 2
    s = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
    return float(s.mean())


def ssim(ref: np.ndarray, test: np.ndarray, params: SSIMParams | None = None) -> float:
    """Mean structural similarity over sliding windows, averaged over channels."""
    _same_shape(ref, test)
    p = params or SSIMParams()
    vals = [_ssim_channel(a, b, p) for a, b in zip(_channels(ref), _channels(test))]
    return float(np.mean(vals))


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr: float
    ssim: float


def quality(ref: np.ndarray, test: np.ndarray, params: SSIMParams | None = None) -> QualityReport:
    return QualityReport(mse(ref, test), psnr(ref, test), ssim(ref, test, params))


# --- benchmark --------------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    design: str
    image: str
    ssim: float
    psnr: float


def run_benchmark(images: Mapping[str, np.ndarray], designs: Mapping[str, MulFn],
                  params: SSIMParams | None = None) -> list[BenchRow]:
    """Score each design's sharpening against the exact pipeline.

    Returns per-image rows followed by one ``image="mean"`` row per design.
    """
    if not images or not designs:
        raise ValueError("need at least one image and one design")
    refs = {name: sharpen(img) for name, img in images.items()}
    rows: list[BenchRow] = []
    for dname, mul in designs.items():
        mine = []
        for iname, img in images.items():
            q = quality(refs[iname], sharpen(img, mul), params)
            mine.append(BenchRow(dname, iname, q.ssim, q.psnr))
        rows.extend(mine)
        rows.append(BenchRow(dname, "mean", float(np.mean([r.ssim for r in mine])),
                             float(np.mean([r.psnr for r in mine]))))
    return rows


BENCH_CSV_HEADER = "design,image,ssim,psnr"


def bench_csv(rows: Iterable[BenchRow]) -> str:
    lines = [BENCH_CSV_HEADER] + [f"{r.design},{r.image},{r.ssim:.6f},{r.psnr:.4f}" for r in rows]
    return "\n".join(lines) + "\n"


def load_images(folder: str | Path) -> dict[str, np.ndarray]:
    """All ``.pgm``/``.ppm`` files in ``folder``, keyed by file name."""
    paths = sorted(p for p in Path(folder).iterdir() if p.suffix.lower() in (".pgm", ".ppm"))
    return {p.name: read_netpbm(p) for p in paths}
