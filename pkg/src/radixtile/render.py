"""Deterministic raster output of depth-k tile approximations.

Point clouds are kept as exact integer combinations w = sum A^{k-j} d_j;
the true points are A^-k w.  Pixel mapping happens in exact integer
arithmetic against a rational bounding box, so identical inputs always
produce identical bytes.  Output is binary PGM (P5) for single clouds and
PPM (P6) for overlays.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import DepthTooLarge, EmptyCloud
from .linalg import IntVec, RatVec
from .numsys import RadixSystem
from .radix import EpSeq


@dataclass(frozen=True)
class PointCloud:
    """Depth-k partial sums stored as integer vectors w = A^k * point."""

    system: RadixSystem
    depth: int
    int_points: tuple[IntVec, ...]

    @property
    def points(self) -> tuple[RatVec, ...]:
        inv_k = linalg.mat_inv_pow(self.system.matrix, self.depth)
        return tuple(linalg.frac_mat_vec(inv_k, w) for w in self.int_points)

    def __len__(self) -> int:
        return len(self.int_points)


def ktile_points(
    sys: RadixSystem,
    k: int,
    digit_filter: EpSeq | None = None,
    cap: int = 2**22,
    sample_seed: int | None = None,
) -> PointCloud:
    """All depth-k partial sums, optionally filtered per position.

    digit_filter is an EpSeq of digit sets; position j draws from
    filter entry j instead of the full digit set.  When the exact cloud
    would exceed the cap, a fixed-seed sample of that size is drawn
    instead (DepthTooLarge when sampling is disabled).
    """

    def choices(j: int) -> list[IntVec]:
        if digit_filter is None:
            return list(sys.digits)
        entry = digit_filter.entry(j)
        return sorted(linalg.as_vec(d) for d in entry)

    total = 1
    for j in range(k):
        total *= len(choices(j))
        if total > cap:
            break
    if total > cap:
        if sample_seed is None:
            raise DepthTooLarge(f"cloud of {total} points exceeds cap {cap}")
        rng = random.Random(sample_seed)
        pts = set()
        attempts = 0
        while len(pts) < cap and attempts < 20 * cap:
            attempts += 1
            w = linalg.zero_vec(sys.n)
            for j in range(k):
                w = linalg.vec_add(linalg.mat_vec(sys.matrix, w), rng.choice(choices(j)))
            pts.add(w)
        return PointCloud(system=sys, depth=k, int_points=tuple(sorted(pts)))

    # positions enter most significant first, matching sum A^{k-j} d_j
    if _int_entry_bound(sys, k) < 2**62:
        a_t = np.array(sys.matrix, dtype=np.int64).T
        points = np.zeros((1, sys.n), dtype=np.int64)
        for j in range(k):
            digits = np.array(choices(j), dtype=np.int64)
            points = (points @ a_t)[:, None, :] + digits[None, :, :]
            points = points.reshape(-1, sys.n)
        points = np.unique(points, axis=0)
        return PointCloud(
            system=sys, depth=k, int_points=tuple(map(tuple, points.tolist()))
        )

    points = [linalg.zero_vec(sys.n)]
    for j in range(k):
        digits = choices(j)
        nxt = []
        for w in points:
            base = linalg.mat_vec(sys.matrix, w)
            for d in digits:
                nxt.append(linalg.vec_add(base, d))
        points = nxt
    return PointCloud(system=sys, depth=k, int_points=tuple(sorted(set(points))))


def _int_entry_bound(sys: RadixSystem, k: int) -> int:
    """Certified bound on |entries| of depth-k integer partial sums."""
    row_sum = max(sum(abs(x) for x in row) for row in sys.matrix)
    max_digit = max(abs(x) for d in sys.digits for x in d)
    bound = 0
    for _ in range(k):
        bound = row_sum * bound + max_digit
    return bound


@dataclass(frozen=True)
class RasterImage:
    width: int
    height: int
    channels: int
    pixels: bytes
    bbox: tuple[tuple[Fraction, Fraction], ...]

    def to_pnm(self) -> bytes:
        magic = b"P5" if self.channels == 1 else b"P6"
        header = magic + f"\n{self.width} {self.height}\n255\n".encode()
        return header + self.pixels


def _scaled_coords(cloud: PointCloud) -> tuple[list[tuple[int, int]], int]:
    """Integer coordinates det^k-scaled: exact values of A^-k w times det^k.

    One-dimensional systems render along the x axis.
    """
    a = cloud.system.matrix
    n = cloud.system.n
    k = cloud.depth
    d = linalg.det(a)
    scale = d**k
    m = linalg.mat_pow(linalg.adjugate(a), k)  # m / det^k == A^-k exactly
    coords = []
    for w in cloud.int_points:
        xy = [sum(m[i][j] * w[j] for j in range(n)) for i in range(min(n, 2))]
        if n == 1:
            xy.append(0)
        coords.append(tuple(xy))
    if scale < 0:
        coords = [(-x, -y) for x, y in coords]
        scale = -scale
    return coords, scale


def rasterize(
    clouds,
    width: int,
    height: int,
    bbox: tuple[tuple[Fraction, Fraction], ...] | None = None,
) -> RasterImage:
    """Paint clouds into channels; multiple clouds produce an RGB image.

    The bounding box defaults to the union of cloud bounds padded by 5%.
    All coordinate mapping is exact integer arithmetic.
    """
    clouds = list(clouds)
    if not clouds or all(len(c) == 0 for c in clouds):
        raise EmptyCloud("nothing to rasterize")
    if any(c.system.n > 2 for c in clouds):
        raise ValueError("rasterization covers 1-d and 2-d systems")

    scaled = [_scaled_coords(c) for c in clouds]

    if bbox is None:
        lo = [None, None]
        hi = [None, None]
        for coords, scale in scaled:
            for axis in (0, 1):
                mn = Fraction(min(p[axis] for p in coords), scale)
                mx = Fraction(max(p[axis] for p in coords), scale)
                lo[axis] = mn if lo[axis] is None else min(lo[axis], mn)
                hi[axis] = mx if hi[axis] is None else max(hi[axis], mx)
        pads = [(hi[a] - lo[a]) / 20 or Fraction(1, 2) for a in (0, 1)]
        bbox = tuple((lo[a] - pads[a], hi[a] + pads[a]) for a in (0, 1))

    channels = 1 if len(clouds) == 1 else 3
    buf = bytearray(width * height * channels)
    for channel, (coords, scale) in enumerate(scaled):
        chan = min(channel, channels - 1)
        edges = []
        for axis, pixels in ((0, width), (1, height)):
            a0, a1 = bbox[axis]
            span = a1 - a0
            # pixel i covers scaled coordinates in [edge_i, edge_{i+1});
            # edge_i is the exact ceiling of scale * (a0 + i * span / pixels)
            per_pixel = Fraction(span, pixels)
            edges.append(
                [_ceil_frac(scale * (a0 + i * per_pixel)) for i in range(pixels + 1)]
            )
        x_edges, y_edges = edges
        fits64 = (
            max(abs(v) for v in x_edges + y_edges) < 2**62
            and max((abs(p[0]) for p in coords), default=0) < 2**62
            and max((abs(p[1]) for p in coords), default=0) < 2**62
        )
        if fits64 and len(coords) > 512 and scale > 0:
            arr = np.asarray(coords, dtype=np.int64)
            ix = np.searchsorted(np.asarray(x_edges, dtype=np.int64), arr[:, 0], side="right") - 1
            iy = np.searchsorted(np.asarray(y_edges, dtype=np.int64), arr[:, 1], side="right") - 1
            ix = np.where(ix == width, width - 1, ix)
            iy = np.where(iy == height, height - 1, iy)
            keep = (ix >= 0) & (ix < width) & (iy >= 0) & (iy < height)
            # image rows run top to bottom
            offsets = ((height - 1 - iy[keep]) * width + ix[keep]) * channels + chan
            for off in np.unique(offsets):
                buf[int(off)] = 255
        else:
            for px, py in coords:
                ix = bisect.bisect_right(x_edges, px) - 1
                iy = bisect.bisect_right(y_edges, py) - 1
                ix = width - 1 if ix == width else ix
                iy = height - 1 if iy == height else iy
                if 0 <= ix < width and 0 <= iy < height:
                    buf[((height - 1 - iy) * width + ix) * channels + chan] = 255
    return RasterImage(width=width, height=height, channels=channels, pixels=bytes(buf), bbox=bbox)


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def render_overlap(
    sys: RadixSystem,
    shift: IntVec,
    k: int,
    width: int = 256,
    height: int = 256,
) -> RasterImage:
    """Tile in the red channel, shifted tile in green; overlap shows both."""
    shift = linalg.as_vec(shift)
    base = ktile_points(sys, k)
    scale_shift = linalg.mat_vec(linalg.mat_pow(sys.matrix, k), shift)
    shifted = PointCloud(
        system=sys,
        depth=k,
        int_points=tuple(sorted(linalg.vec_add(w, scale_shift) for w in base.int_points)),
    )
    return rasterize([base, shifted], width, height)


def overlap_pixel_count(img: RasterImage) -> int:
    """Pixels lit in both of the first two channels."""
    if img.channels != 3:
        raise ValueError("overlap counting needs an RGB image")
    data = img.pixels
    return sum(
        1
        for i in range(0, len(data), 3)
        if data[i] and data[i + 1]
    )
