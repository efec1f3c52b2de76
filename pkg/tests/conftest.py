import math

import pytest

from pflion.lens import LensPrescription, fast_prescription, reference_prescription

LAM = 369.5e-9


def lens_with_na(na, f=3e-4, levels=2):
    """Lens of focal length f whose aperture gives numerical aperture `na`."""
    return LensPrescription(LAM, f, 2 * f * math.tan(math.asin(na)), levels)


@pytest.fixture(scope="session")
def reference_lens():
    return reference_prescription()


@pytest.fixture(scope="session")
def fast_lens():
    return fast_prescription(reference_prescription())
