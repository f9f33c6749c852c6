import numpy as np
import pytest

from outlierfrechet import make_curve


def random_curve(rng, nseg, start=None, scale=1.0):
    """Random polygonal curve with nseg segments and bounded turning."""
    p = np.array(start, dtype=float) if start is not None \
        else rng.uniform(0.0, 2.0, 2)
    pts = [p]
    ang = rng.uniform(0, 2 * np.pi)
    for _ in range(nseg):
        ang += rng.uniform(-1.2, 1.2)
        step = rng.uniform(0.5, 1.5) * scale
        pts.append(pts[-1] + step * np.array([np.cos(ang), np.sin(ang)]))
    return make_curve(pts)


def perturbed_pair(rng, n1, n2, eps):
    """A curve plus a noisy companion sharing nearby endpoints; the noise
    stays well inside the leash so the pair has a large matched length."""
    t1 = random_curve(rng, n1)
    jitter = 0.25 * eps
    interior = [t1.point_at_arclength(s) + rng.uniform(-jitter, jitter, 2)
                for s in np.linspace(0, t1.length, n2 + 1)[1:-1]]
    pts = [t1.vertices[0] + rng.uniform(-jitter, jitter, 2)]
    pts += interior
    pts.append(t1.vertices[-1] + rng.uniform(-jitter, jitter, 2))
    return t1, make_curve(pts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
