import numpy as np
import pytest

ACCEPTANCE_LOG = []


def record_acceptance(number, title, passed, detail=""):
    ACCEPTANCE_LOG.append((number, title, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_LOG):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title} {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def natural_images():
    """Standard 512x512 8-bit grayscale test images shipped with scikit-image."""
    from skimage import data
    from skimage.color import rgb2gray

    from ggdshrink.image import ImageBuffer

    return {
        "camera": ImageBuffer(data.camera().astype(float)),
        "moon": ImageBuffer(data.moon().astype(float)),
        "astronaut": ImageBuffer(rgb2gray(data.astronaut()) * 255.0),
    }


@pytest.fixture(scope="session")
def camera():
    return natural_images()["camera"]


@pytest.fixture
def ramp_blocks():
    from ggdshrink.image import ImageBuffer

    yy, xx = np.mgrid[0:512, 0:512]
    img = 0.2 * xx + 0.1 * yy
    img[64:192, 64:192] += 60.0
    img[256:448, 300:480] += 90.0
    return ImageBuffer(img)
