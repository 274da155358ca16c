import itertools

import numpy as np
import pytest

from ldpcqubo.codes import derive_generator, load_code, resolve_code


@pytest.fixture(scope="session")
def h32():
    return load_code(resolve_code("ldpc_32_16"))


@pytest.fixture(scope="session")
def g32(h32):
    return derive_generator(h32)


@pytest.fixture(scope="session")
def toy():
    return load_code(resolve_code("toy_8_4"))


def all_words(n):
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)


def brute_codewords(h):
    """Codebook by filtering all 2^n words (independent of the generator)."""
    words = all_words(h.cols)
    return words[((words.astype(int) @ h.dense.T.astype(int)) % 2 == 0).all(axis=1)]


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
