"""Bundled synthetic test data: a piecewise-smooth colour image and a text bitmap."""

from __future__ import annotations

import numpy as np

# 5x7 glyphs, one string per row, '#' = ink
_GLYPHS = {
    "R": ["####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"],
    "O": [".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."],
    "B": ["####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."],
    "U": ["#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."],
    "S": [".####", "#....", "#....", ".###.", "....#", "....#", "####."],
    "T": ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."],
    "E": ["#####", "#....", "#....", "####.", "#....", "#....", "#####"],
    "N": ["#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"],
    "I": ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"],
    "G": [".####", "#....", "#....", "#.###", "#...#", "#...#", ".###."],
    " ": ["....."] * 7,
}

WATERMARK_TEXT = "ROBUST TENSOR RING"


def text_bitmap(text: str = WATERMARK_TEXT) -> np.ndarray:
    """Boolean bitmap (7 rows) of ``text`` with one blank column between glyphs."""
    cols = []
    for ch in text.upper():
        glyph = _GLYPHS.get(ch, _GLYPHS[" "])
        cols.append(np.array([[c == "#" for c in row] for row in glyph]))
        cols.append(np.zeros((7, 1), dtype=bool))
    return np.hstack(cols[:-1])


def synthetic_image(height: int = 64, width: int = 96) -> np.ndarray:
    """Deterministic piecewise-smooth RGB image with values in [0, 1]."""
    yy, xx = np.meshgrid(np.linspace(0, 1, height), np.linspace(0, 1, width), indexing="ij")
    img = np.empty((height, width, 3))
    img[..., 0] = 0.25 + 0.35 * xx + 0.1 * np.sin(2 * np.pi * yy)
    img[..., 1] = 0.3 + 0.3 * yy + 0.08 * np.cos(np.pi * xx)
    img[..., 2] = 0.6 - 0.25 * xx * yy

    # a rectangle, a disc and a diagonal band, each with its own smooth shading
    rect = (yy > 0.15) & (yy < 0.55) & (xx > 0.1) & (xx < 0.4)
    img[rect] = np.stack([0.85 - 0.3 * yy, 0.2 + 0.2 * xx, 0.15 + 0.1 * yy], axis=-1)[rect]

    disc = (yy - 0.62) ** 2 + ((xx - 0.68) * 1.5) ** 2 < 0.07
    img[disc] = np.stack([0.1 + 0.2 * xx, 0.55 + 0.3 * yy, 0.8 - 0.2 * xx], axis=-1)[disc]

    band = np.abs(yy - (1.2 - 1.1 * xx)) < 0.06
    img[band] = np.stack([0.95 - 0.1 * xx, 0.9 - 0.2 * yy, 0.3 + 0.2 * xx], axis=-1)[band]
    return np.clip(img, 0.0, 1.0)
