import numpy as np
import pytest
from PIL import Image


def synthetic_scene(i: int) -> np.ndarray:
    """Deterministic natural-image stand-ins (gradients + texture noise)."""
    rng = np.random.default_rng(1000 + i)
    h, w = 300, 400
    yy, xx = np.mgrid[0:h, 0:w]
    base = np.stack([(xx * (i + 1)) % 256, (yy + 40 * i) % 256,
                     ((xx + yy) // 2) % 256], axis=-1)
    noise = rng.integers(0, 40, (h, w, 3))
    return np.clip(base + noise, 0, 255).astype(np.uint8)


@pytest.fixture(scope="session")
def test_images(tmp_path_factory):
    d = tmp_path_factory.mktemp("images")
    paths = []
    for i in range(3):
        p = d / f"scene{i}.png"
        Image.fromarray(synthetic_scene(i)).save(p)
        paths.append(p)
    return paths
