"""Image I/O, binarization and rendering of signed edge-map data.

Images are plain 2-D ``float64`` numpy arrays indexed ``[row, col]``
(``y`` downward, ``x`` rightward).  Stimuli live in [0, 1] with 0 = black;
DoG responses are signed.  Color images are ``(H, W, 3)`` ``uint8`` arrays.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image as PILImage, UnidentifiedImageError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

# (index, (r, g, b)) knots of the jet-with-white-midpoint table
JETWHITE_KNOTS = (
    (0, (0, 0, 143)),
    (32, (0, 0, 255)),
    (96, (0, 255, 255)),
    (128, (255, 255, 255)),
    (160, (255, 255, 0)),
    (224, (255, 0, 0)),
    (255, (128, 0, 0)),
)
LUT_CENTER = 128

_SUPPORTED_SUFFIXES = {".png", ".pgm"}


class ImageIOError(OSError):
    """Raised when an image cannot be read or written."""

    def __init__(self, path, cause):
        self.path = str(path)
        self.cause = cause
        super().__init__(f"{self.path}: {cause}")


def as_image(data) -> np.ndarray:
    """Coerce array-like data into a read-only 2-D float64 image."""
    img = np.array(data, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"image must be a non-empty 2-D array, got shape {img.shape}")
    img.setflags(write=False)
    return img


def load_image(path) -> np.ndarray:
    """Read a PNG or binary PGM file as a grayscale image in [0, 1].

    RGB inputs are reduced with Rec. 601 luma weights.  The sample maximum is
    taken from the file's bit depth (8-bit PNG, PGM maxval).
    """
    path = Path(path)
    if path.suffix.lower() not in _SUPPORTED_SUFFIXES:
        raise ImageIOError(path, f"unsupported format {path.suffix or '(none)'!r}")
    if not path.is_file():
        raise ImageIOError(path, "no such file")
    if path.suffix.lower() == ".pgm":
        return _read_pgm(path)
    try:
        with PILImage.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("RGBA", "LA", "P", "PA"):
                im = im.convert("RGB" if mode != "LA" else "L")
                mode = im.mode
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageIOError(path, f"corrupt or unreadable image ({exc})") from exc

    if mode == "RGB":
        rgb = arr.astype(np.float64) / 255.0
        return as_image(rgb @ np.array(LUMA_WEIGHTS))
    if mode == "L":
        return as_image(arr.astype(np.float64) / 255.0)
    if mode == "1":
        return as_image(arr.astype(np.float64))
    raise ImageIOError(path, f"unsupported PNG mode {mode!r}")


def _read_pgm(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    tokens = []
    pos = 0
    # magic, width, height, maxval; '#' comments allowed between tokens
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageIOError(path, "corrupt PGM header (truncated)")
        tokens.append(raw[start:pos])
    if tokens[0] != b"P5":
        raise ImageIOError(path, f"corrupt PGM header (magic {tokens[0]!r}, expected b'P5')")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageIOError(path, "corrupt PGM header (non-integer field)") from exc
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise ImageIOError(path, "corrupt PGM header (bad dimensions or maxval)")
    pos += 1  # single whitespace byte terminates the header
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    nbytes = width * height * dtype.itemsize
    body = raw[pos : pos + nbytes]
    if len(body) < nbytes:
        raise ImageIOError(path, f"truncated PGM data ({len(body)} of {nbytes} bytes)")
    arr = np.frombuffer(body, dtype=dtype).reshape(height, width)
    return as_image(arr.astype(np.float64) / maxval)


def to_uint8(img) -> np.ndarray:
    """Affinely map ``[min, max]`` onto ``[0, 255]``, rounding half up.

    A constant image maps to mid-gray 128.
    """
    img = np.asarray(img, dtype=np.float64)
    lo, hi = float(img.min()), float(img.max())
    if hi == lo:
        return np.full(img.shape, 128, dtype=np.uint8)
    scaled = ((img - lo) / (hi - lo)) * 255.0
    return np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)


def _write(pil_image: PILImage.Image, path) -> None:
    path = Path(path)
    try:
        pil_image.save(path, format="PNG" if path.suffix.lower() != ".pgm" else "PPM")
    except (OSError, ValueError) as exc:
        raise ImageIOError(path, f"cannot write ({exc})") from exc


def save_grayscale(img, path) -> None:
    """Write ``img`` as an 8-bit grayscale PNG (or PGM, by suffix)."""
    _write(PILImage.fromarray(to_uint8(img), mode="L"), path)


def save_rgb(rgb, path) -> None:
    rgb = np.asarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) array, got {rgb.shape}")
    _write(PILImage.fromarray(rgb, mode="RGB"), path)


def binarize(img, threshold: float = 0.0) -> np.ndarray:
    """1 where ``img > threshold`` (strict), else 0."""
    return as_image(np.asarray(img) > threshold)


def jetwhite_lut() -> np.ndarray:
    """256x3 uint8 table, piecewise linear through :data:`JETWHITE_KNOTS`."""
    idx = np.array([k for k, _ in JETWHITE_KNOTS], dtype=np.float64)
    rgb = np.array([c for _, c in JETWHITE_KNOTS], dtype=np.float64)
    grid = np.arange(256, dtype=np.float64)
    table = np.stack([np.interp(grid, idx, rgb[:, ch]) for ch in range(3)], axis=1)
    return np.floor(table + 0.5).astype(np.uint8)


def jetwhite_indices(img) -> np.ndarray:
    """LUT index per pixel on the symmetric range ``[-M, M]``.

    The offset from the white center is rounded half away from zero so that
    ``v`` and ``-v`` land equidistant from index 128; ``+M`` clips to 255.
    """
    img = np.asarray(img, dtype=np.float64)
    m = float(np.max(np.abs(img))) if img.size else 0.0
    if m == 0.0:
        return np.full(img.shape, LUT_CENTER, dtype=np.intp)
    offset = (img / m) * LUT_CENTER
    offset = np.sign(offset) * np.floor(np.abs(offset) + 0.5)
    return np.clip(LUT_CENTER + offset, 0, 255).astype(np.intp)


def render_jetwhite(img) -> np.ndarray:
    """Render signed data as RGB: negative blue, zero white, positive red."""
    return jetwhite_lut()[jetwhite_indices(img)]
