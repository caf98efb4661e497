import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from dogillusion.dogfilter import DoGSpec, dog_filter
from dogillusion.imagecore import (
    LUT_CENTER,
    ImageIOError,
    binarize,
    jetwhite_indices,
    jetwhite_lut,
    load_image,
    render_jetwhite,
    save_grayscale,
    to_uint8,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
images = arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)), elements=finite)


def _write_pgm(path, w, h, pixels, maxval=255):
    path.write_bytes(f"P5\n# test\n{w} {h}\n{maxval}\n".encode() + bytes(pixels))


def test_load_pgm_rescales(tmp_path):
    p = tmp_path / "a.pgm"
    _write_pgm(p, 2, 2, [0, 255, 255, 0])
    np.testing.assert_array_equal(load_image(p), [[0, 1], [1, 0]])


def test_load_white_png(tmp_path):
    p = tmp_path / "w.png"
    Image.fromarray(np.full((3, 5), 255, np.uint8), mode="L").save(p)
    img = load_image(p)
    assert img.shape == (3, 5)
    assert np.all(img == 1.0)


def test_load_rgb_uses_luma(tmp_path):
    p = tmp_path / "red.png"
    rgb = np.zeros((1, 1, 3), np.uint8)
    rgb[..., 0] = 255
    Image.fromarray(rgb, mode="RGB").save(p)
    assert load_image(p)[0, 0] == pytest.approx(0.299, abs=1 / 255)


@pytest.mark.parametrize(
    "name, content, match",
    [
        ("missing.png", None, "no such file"),
        ("picture.jpg", b"xx", "unsupported format"),
        ("bad.pgm", b"P2\n2 2\n255\n0 0 0 0", "magic"),
        ("short.pgm", b"P5\n4 4\n255\n\x00\x00", "truncated"),
        ("junk.png", b"not a png at all", "corrupt"),
    ],
)
def test_load_errors_name_path_and_cause(tmp_path, name, content, match):
    p = tmp_path / name
    if content is not None:
        p.write_bytes(content)
    with pytest.raises(ImageIOError, match=match) as info:
        load_image(p)
    assert str(p) in str(info.value)


def test_save_grayscale_affine(tmp_path):
    p = tmp_path / "x.png"
    save_grayscale(np.array([[-3.0, 0.0, 3.0]]), p)
    np.testing.assert_array_equal(np.asarray(Image.open(p)), [[0, 128, 255]])
    save_grayscale(np.array([[0.0, 1.0]]), p)
    np.testing.assert_array_equal(np.asarray(Image.open(p)), [[0, 255]])
    save_grayscale(np.array([[5.0, 5.0]]), p)
    np.testing.assert_array_equal(np.asarray(Image.open(p)), [[128, 128]])


def test_save_unwritable(tmp_path):
    with pytest.raises(ImageIOError):
        save_grayscale(np.zeros((2, 2)), tmp_path / "nope" / "x.png")


def test_pgm_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    pixels = rng.integers(0, 256, size=30).tolist()
    pixels[0], pixels[1] = 0, 255
    src = tmp_path / "src.pgm"
    _write_pgm(src, 6, 5, pixels)
    img = load_image(src)
    out = tmp_path / "back.pgm"
    save_grayscale(img, out)
    assert np.max(np.abs(load_image(out) - img)) <= 1 / 255


def test_binarize_strict():
    np.testing.assert_array_equal(binarize(np.array([[-0.2, 0.0, 0.7]])), [[0, 0, 1]])
    assert not binarize(-np.ones((3, 3))).any()


def test_binarize_step_edge_sign_pattern():
    step = np.zeros((40, 80))
    step[:, 40:] = 1.0
    b = binarize(dog_filter(step, DoGSpec(2.0)))
    row = b[20]
    assert row[40:44].all()  # bright side next to the edge
    assert not row[36:40].any()  # dark side


@given(images)
def test_binarize_idempotent(img):
    once = binarize(img)
    np.testing.assert_array_equal(binarize(once), once)


def test_jetwhite_fixed_points():
    assert np.all(render_jetwhite(np.zeros((2, 3))) == 255)
    rgb = render_jetwhite(np.array([[-2.0, 0.0, 2.0]]))
    assert tuple(rgb[0, 0]) == (0, 0, 143)
    assert tuple(rgb[0, 1]) == (255, 255, 255)
    assert tuple(rgb[0, 2]) == (128, 0, 0)


def test_jetwhite_half_range_mirrored():
    rgb = render_jetwhite(np.array([[-1.0, 1.0, -2.0, 2.0]]))
    neg, pos = rgb[0, 0], rgb[0, 1]
    np.testing.assert_array_equal(neg, pos[::-1])


def test_lut_knots():
    lut = jetwhite_lut()
    assert lut.shape == (256, 3)
    for idx, color in [(0, (0, 0, 143)), (32, (0, 0, 255)), (96, (0, 255, 255)), (128, (255, 255, 255)),
                       (160, (255, 255, 0)), (224, (255, 0, 0)), (255, (128, 0, 0))]:
        assert tuple(lut[idx]) == color


@given(images)
def test_jetwhite_index_symmetry(img):
    m = np.max(np.abs(img))
    assume(m > 0)
    idx, mirror = jetwhite_indices(np.append(img.ravel(), m)), jetwhite_indices(np.append(-img.ravel(), m))
    # offsets that round to 128 clip to 255 on the positive side only
    inner = np.abs(img.ravel()) / m * LUT_CENTER < LUT_CENTER - 0.5
    off_pos = idx[:-1][inner] - LUT_CENTER
    off_neg = mirror[:-1][inner] - LUT_CENTER
    np.testing.assert_array_equal(off_pos, -off_neg)


@given(images)
def test_to_uint8_range(img):
    out = to_uint8(img)
    if img.max() > img.min():
        assert out.min() == 0 and out.max() == 255
    else:
        assert np.all(out == 128)
