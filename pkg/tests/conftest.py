"""Shared helpers: a counter-hash random stream and instance samplers.

No test uses the global RNG. Every pseudo-random choice is drawn from
``HashStream(label)``, whose k-th word is the SHA-256 of ``label:k``, so a
run is bit-reproducible and each test owns an independent stream.
"""

import hashlib

import pytest

from mcayley.groups import automorphism_group, make_named_group
from mcayley.normalizer import NormalizerElement
from mcayley.repro.census import InstanceSpace

# (group, m) pairs used by the structural property suites
CATALOG = [("Z2", 2), ("Z2", 3), ("Z3", 2), ("Z3", 3), ("Z4", 2), ("Z2xZ2", 2), ("D6", 2)]


class HashStream:
    def __init__(self, label):
        self.label = label
        self.counter = 0

    def bits(self, k):
        out, have = 0, 0
        while have < k:
            digest = hashlib.sha256(f"{self.label}:{self.counter}".encode()).digest()
            self.counter += 1
            out |= int.from_bytes(digest, "big") << have
            have += 256
        return out & ((1 << k) - 1)

    def below(self, n):
        # rejection sampling keeps the draw uniform
        k = max(1, (n - 1).bit_length())
        while True:
            x = self.bits(k)
            if x < n:
                return x

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def permutation(self, m):
        items = list(range(m))
        for i in range(m - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return tuple(items)


def random_instance(stream, group, m, mode):
    space = InstanceSpace(make_named_group(group) if isinstance(group, str) else group, m, mode)
    return space.build(stream.bits(space.nbits) if space.nbits else 0)


def random_nelem(stream, g, m):
    auts = automorphism_group(g)
    left = tuple(stream.below(g.order) for _ in range(m))
    return NormalizerElement(left, stream.choice(auts), stream.permutation(m))


@pytest.fixture
def stream(request):
    return HashStream(request.node.nodeid)


# Acceptance verdict lines, printed in the terminal summary so they show up
# without -s.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
