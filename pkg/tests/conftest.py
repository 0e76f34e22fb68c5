import numpy as np
import pytest

from torusnoise.channels import KrausChannel, identity_channel
from torusnoise.maps import quantum_baker, quantum_standard_map, unitary_channel
from torusnoise.noise import (GadModel, amplitude_damping_qubit, gad_channel, random_unitary_sum,
                              rup_gaussian, sdc_channel, sloppy_noise)
from torusnoise.torus import TorusSpace


def random_density(N, rng, rank=None):
    rank = N if rank is None else rank
    A = rng.normal(size=(N, rank)) + 1j * rng.normal(size=(N, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def random_stochastic(N, rng, symmetric=False):
    """Row-stochastic matrix (rows are sources); symmetric ones are bistochastic."""
    if symmetric:
        # average of permutation matrices of an involution-closed set is symmetric
        m = np.zeros((N, N))
        w = rng.dirichlet(np.ones(3))
        for wi in w:
            perm = rng.permutation(N)
            P = np.eye(N)[perm]
            m += wi * (P + P.T) / 2
        return m
    m = rng.random((N, N)) + 0.1
    return m / m.sum(axis=1, keepdims=True)


def random_gad(N, rng, periodic=False):
    m0 = random_stochastic(N, rng)
    if not periodic:
        m0 = np.tril(m0)  # non-wrapping ladder: sources only decay to lower or equal index
        m0 /= m0.sum(axis=1, keepdims=True)
    phases = np.exp(2j * np.pi * rng.random((N, N)))
    return GadModel.from_transition_matrix(m0, phases, periodic=periodic)


def channel_zoo(N, seed=0):
    """Named channels on an N-dimensional torus covering every family."""
    rng = np.random.default_rng(seed)
    space = TorusSpace(N)
    zoo = {
        "identity": identity_channel(space),
        "sdc_0.5_0.5": sdc_channel(space, 0.5, 0.5),
        "sdc_0.25_1/N": sdc_channel(space, 0.25, 1.0 / N),
        "sdc_signed": sdc_channel(space, 0.75, 0.3, signed=True),
        "sloppy": sloppy_noise(space, 4.0 / N),
        "rup": rup_gaussian(space, 0.1),
        "random_unitary": random_unitary_sum(space, 3, rng),
        "gad": gad_channel(space, random_gad(N, rng)),
        "standard": unitary_channel(quantum_standard_map(space, 0.065), space),
    }
    bspace = TorusSpace(N, 0.5, 0.5)
    zoo["baker_sloppy"] = KrausChannel(
        bspace, sloppy_noise(bspace, 2.0 / N).kraus @ quantum_baker(bspace)[None])
    return zoo


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def qubit_damping():
    return amplitude_damping_qubit(0.3)


# acceptance lines collected by test_acceptance and echoed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
