"""Kraus-channel noise on protocol resources, with fidelity-vs-noise sweeps.

Noise is applied to the resource state after preparation and before any
measurement; the protocol then runs in full operator algebra via
:func:`tripsim.teleport.average_fidelity_density`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityOp, InvariantViolation, PAULI_X, PAULI_Y, PAULI_Z
from .teleport import ProtocolBundle, average_fidelity_density, protocol_bundle

_COMPLETENESS_ATOL = 1e-12


@dataclass(frozen=True)
class KrausChannel:
    """A completeness-satisfying set of Kraus matrices."""

    kind: str
    parameter: float
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        object.__setattr__(self, "kraus", mats)
        dim = mats[0].shape[0]
        acc = sum(k.conj().T @ k for k in mats)
        if not np.allclose(acc, np.eye(dim), atol=_COMPLETENESS_ATOL, rtol=0.0):
            raise InvariantViolation(
                "kraus-completeness", "sum K†K differs from identity beyond 1e-12"
            )


def _check_param(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def bit_flip(p: float) -> KrausChannel:
    p = _check_param("p", p)
    return KrausChannel(
        "bitflip", p, (math.sqrt(1.0 - p) * np.eye(2), math.sqrt(p) * PAULI_X)
    )


def phase_flip(p: float) -> KrausChannel:
    p = _check_param("p", p)
    return KrausChannel(
        "phaseflip", p, (math.sqrt(1.0 - p) * np.eye(2), math.sqrt(p) * PAULI_Z)
    )


def depolarizing(p: float) -> KrausChannel:
    p = _check_param("p", p)
    return KrausChannel(
        "depolarizing",
        p,
        (
            math.sqrt(1.0 - 3.0 * p / 4.0) * np.eye(2),
            math.sqrt(p / 4.0) * PAULI_X,
            math.sqrt(p / 4.0) * PAULI_Y,
            math.sqrt(p / 4.0) * PAULI_Z,
        ),
    )


def amplitude_damping(gamma: float) -> KrausChannel:
    gamma = _check_param("gamma", gamma)
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel("amplitude-damping", gamma, (k0, k1))


CHANNELS = {
    "bitflip": bit_flip,
    "phaseflip": phase_flip,
    "depolarizing": depolarizing,
    "amplitude-damping": amplitude_damping,
}


def make_channel(kind: str, parameter: float) -> KrausChannel:
    if kind not in CHANNELS:
        raise ValueError(f"unknown channel kind {kind!r}; known: {sorted(CHANNELS)}")
    return CHANNELS[kind](parameter)


def _apply_kraus_1q(mat: np.ndarray, n: int, kraus, q: int) -> np.ndarray:
    """sum_i K_i rho K_i† with each K acting on qubit q of an n-qubit rho."""
    t = mat.reshape([2] * (2 * n))
    out = np.zeros_like(t)
    for k in kraus:
        left = np.moveaxis(np.tensordot(k, t, axes=([1], [q])), 0, q)
        out += np.moveaxis(np.tensordot(left, k.conj(), axes=([n + q], [1])), -1, n + q)
    return out.reshape(mat.shape)


def apply_channel(rho: DensityOp, ch: KrausChannel, target: int) -> DensityOp:
    """Apply a single-qubit channel to one qubit of a register state."""
    n = rho.num_qubits
    if not 0 <= target < n:
        raise IndexError(f"target {target} out of range for {n} qubits")
    return DensityOp(_apply_kraus_1q(rho.matrix, n, ch.kraus, target))


def _resource_targets(bundle: ProtocolBundle, target) -> tuple[int, ...]:
    """Validate full-register indices and map them to resource-local ones."""
    targets = tuple(int(t) for t in np.atleast_1d(target))
    lo, hi = bundle.n_input, bundle.n_total
    for t in targets:
        if not lo <= t < hi:
            raise ValueError(
                f"target {t} is not a resource qubit of {bundle.name} "
                f"(valid range {lo}..{hi - 1})"
            )
    return tuple(t - lo for t in targets)


def sample_input_pairs(count: int, rng: np.random.Generator) -> np.ndarray:
    """Amplitude pairs drawn uniformly in |c0|^2 and relative phase."""
    u = rng.random(count)
    phases = 2.0 * math.pi * rng.random(count)
    return np.stack([np.sqrt(u), np.sqrt(1.0 - u) * np.exp(1j * phases)], axis=1)


def noisy_teleport_sweep(
    protocol: str,
    channel_kind: str,
    target,
    p_grid,
    input_samples: int,
    rng: np.random.Generator,
    params: dict | None = None,
) -> list[tuple[float, float]]:
    """Average protocol fidelity after noising the designated resource qubit(s).

    The same sampled inputs are reused across the whole grid so the curve
    is smooth in the channel parameter and deterministic given the seed.
    """
    if input_samples < 1:
        raise ValueError(f"input_samples must be >= 1, got {input_samples}")
    bundle = protocol_bundle(protocol, **(params or {}))
    local_targets = _resource_targets(bundle, target)
    n_res = bundle.resource.num_qubits
    res = bundle.resource.amplitudes
    resource_rho = np.outer(res, res.conj())
    inputs = sample_input_pairs(input_samples, rng)
    rows: list[tuple[float, float]] = []
    for p in np.asarray(p_grid, dtype=float):
        ch = make_channel(channel_kind, float(p))
        noisy = resource_rho
        for q in local_targets:
            noisy = _apply_kraus_1q(noisy, n_res, ch.kraus, q)
        fid = float(
            np.mean(
                [average_fidelity_density(bundle, noisy, c0, c1) for c0, c1 in inputs]
            )
        )
        rows.append((float(p), fid))
    return rows
