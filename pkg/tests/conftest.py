import math
import random

import pytest

from cornerlaw.geometry import SectorConfig, site_in_sector

ACCEPTANCE_LINES: list[str] = []


def brute_sites(config):
    """Integer points in the disc by scanning a generous bounding box."""
    u, v = config.apex_offset
    r = config.radius
    pts = []
    for y in range(math.floor(v - r) - 2, math.ceil(v + r) + 3):
        for x in range(math.floor(u - r) - 2, math.ceil(u + r) + 3):
            if (x - u) ** 2 + (y - v) ** 2 <= r * r:
                pts.append((x, y))
    return pts


def brute_counts(config):
    """Cut bonds and corner turns by explicit loops over the scalar predicate."""
    system = set(brute_sites(config))
    in_a = {s: site_in_sector(s, config) for s in system}
    cut = set()
    for (x, y) in system:
        for nb in ((x + 1, y), (x, y + 1)):
            if nb in system and in_a[(x, y)] != in_a[nb]:
                cut.add(((x, y), nb))
    corners = 0
    anchors = []
    for (x, y) in system:
        ring = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
        if not all(p in system for p in ring):
            continue
        flags = [in_a[p] for p in ring]
        k = sum(flags)
        if k in (1, 3):
            c = 1
        elif k == 2 and flags[0] == flags[2]:
            c = 2
        else:
            c = 0
        if c:
            anchors.append((x, y))
        corners += c
    return cut, corners, anchors


def random_config(rng: random.Random, theta_max=math.pi, r_range=(1.5, 7.0)):
    return SectorConfig(
        apex_offset=(rng.random(), rng.random()),
        phi=rng.uniform(0, 2 * math.pi),
        theta=rng.uniform(0, theta_max),
        radius=rng.uniform(*r_range),
    )


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
