"""Dense statevector simulation (up to 26 qubits) with the measurement
conventions used throughout: Y = [[0, i], [-i, 0]] as printed, outcome 0 of a
W-basis measurement corresponding to the projector (I + W)/2.

Also hosts the honest prover: the exact closed-form answer sampler for the
claw game, and the two rounds of the encrypted game.  The first round never
materializes the (nQ+1)-qubit state; for a two-branch residual state the
X-measurements on the non-data qubits are equivalent to uniform bits plus a
phase XOR, which is what gets simulated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Params, balanced_abs, binary_repr, matmul_mod, norminf
from .lattice import EncryptionRecord, ZqArray, invert

MAX_QUBITS = 26

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
BASIS_OPS = {
    "X": PAULI_X,
    "Y": PAULI_Y,
    "XY": (PAULI_X + PAULI_Y) / np.sqrt(2),
}


@dataclass
class StateVector:
    """Amplitudes over computational basis states; qubit j is tensor axis j."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_qubits > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (2 ** self.num_qubits,):
            raise ValueError("amplitude count must be 2**num_qubits")
        self.amplitudes = amps

    @classmethod
    def computational(cls, bits) -> "StateVector":
        bits = [int(b) for b in bits]
        amps = np.zeros(2 ** len(bits), dtype=complex)
        idx = 0
        for b in bits:
            idx = (idx << 1) | b
        amps[idx] = 1.0
        return cls(len(bits), amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def _grid(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.num_qubits)


def apply_zc(state: StateVector, qubit: int, c: float) -> StateVector:
    """Z^c: multiply the |1> component of the target qubit by exp(i pi c)."""
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(f"qubit {qubit} out of range")
    grid = state._grid().copy()
    index = [slice(None)] * state.num_qubits
    index[qubit] = 1
    grid[tuple(index)] *= np.exp(1j * np.pi * c)
    return StateVector(state.num_qubits, grid.reshape(-1))


def measure(state: StateVector, qubit: int, basis: str,
            rng: np.random.Generator) -> tuple[int, StateVector]:
    """Projective W-basis measurement; returns (bit, collapsed state)."""
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(f"qubit {qubit} out of range")
    w = BASIS_OPS[basis]
    grid = state._grid()
    proj0 = (np.eye(2) + w) / 2
    branch0 = np.moveaxis(np.tensordot(proj0, grid, axes=([1], [qubit])), 0, qubit)
    p0 = float(np.linalg.norm(branch0) ** 2)
    if rng.random() < p0:
        outcome, branch, p = 0, branch0, p0
    else:
        proj1 = (np.eye(2) - w) / 2
        branch = np.moveaxis(np.tensordot(proj1, grid, axes=([1], [qubit])), 0, qubit)
        outcome, p = 1, 1.0 - p0
    return outcome, StateVector(state.num_qubits, branch.reshape(-1) / np.sqrt(p))


# ---------------------------------------------------------------------------
# claw states

@dataclass(frozen=True)
class ClawDescription:
    """The residual (d+1)-qubit state after the first round: either the
    superposition (|branch0, 0> + phase |branch1, 1>)/sqrt(2), or a single
    computational branch when only one preimage existed."""

    branch0: np.ndarray | None
    branch1: np.ndarray | None
    phase: int = 1

    def __post_init__(self):
        for name in ("branch0", "branch1"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, np.asarray(v, dtype=np.uint8))
        if self.branch0 is None and self.branch1 is None:
            raise ValueError("at least one branch required")
        if self.phase not in (1, -1):
            raise ValueError("phase must be +1 or -1")
        if self.degenerate is False and len(self.branch0) != len(self.branch1):
            raise ValueError("branches must share a length")

    @property
    def degenerate(self) -> bool:
        return self.branch0 is None or self.branch1 is None

    @property
    def d(self) -> int:
        ref = self.branch0 if self.branch0 is not None else self.branch1
        return len(ref)


def build_claw_state(claw: ClawDescription) -> StateVector:
    """Qubits 0..d-1 carry the branch bits, qubit d is the coin."""
    d = claw.d
    if d + 1 > MAX_QUBITS:
        raise ValueError(f"claw needs {d + 1} qubits > {MAX_QUBITS}")
    if claw.degenerate:
        coin = 0 if claw.branch0 is not None else 1
        bits = claw.branch0 if coin == 0 else claw.branch1
        return StateVector.computational(list(bits) + [coin])
    amps = np.zeros([2] * (d + 1), dtype=complex)
    amps[tuple(claw.branch0) + (0,)] = 1 / np.sqrt(2)
    amps[tuple(claw.branch1) + (1,)] = claw.phase / np.sqrt(2)
    return StateVector(d + 1, amps.reshape(-1))


# ---------------------------------------------------------------------------
# honest strategy, closed form

def _win_parity_target(x, y, a) -> int:
    """Parity of <x, b> needed for u.v to land in {0, 1} mod 4."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    a = np.asarray(a, dtype=np.int64)
    base = int(((x * (1 - 2 * a)) * y).sum()) % 4
    return 0 if base in (0, 1) else 1


_WIN_PROB = 0.5 * (1 + 1 / np.sqrt(2))


def honest_j_sample(d: int, x, y, rng: np.random.Generator,
                    table_cutoff: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """One answer pair from the exact quantum outcome distribution
    P(a, b) = 2^{-2(d+1)} (1 +- 1/sqrt(2)), + exactly when u.v lands in
    {0, 1} mod 4.

    For d <= table_cutoff this inverse-samples the full outcome table; above
    that it uses the equivalent two-stage scheme (a uniform, then b from the
    conditional), which is also what the batch sampler uses.
    """
    x = np.asarray(x, dtype=np.uint8)
    y = np.asarray(y, dtype=np.uint8)
    if len(x) != d + 1 or len(y) != d + 1 or x[-1] != 1 or y[-1] != 1:
        raise ValueError("questions are d+1 bits ending in 1")
    if d <= table_cutoff:
        n_out = 1 << (d + 1)
        outs = ((np.arange(n_out)[:, None] >> np.arange(d + 1)[None, :]) & 1)
        # dots[a_idx, b_idx] = u(a) . v(b)
        v = (y[None, :] + 2 * outs).astype(np.int64)  # (b_idx, d+1)
        ua = (x[None, :] * (1 - 2 * outs)).astype(np.int64)  # (a_idx, d+1)
        dots = (ua @ v.T) % 4
        probs = np.where((dots == 0) | (dots == 1), 1 + 1 / np.sqrt(2),
                         1 - 1 / np.sqrt(2)) / (2 ** (2 * (d + 1)))
        flat = probs.reshape(-1)
        pick = int(np.searchsorted(np.cumsum(flat), rng.random()))
        a_idx, b_idx = divmod(pick, n_out)
        return outs[a_idx].astype(np.uint8), outs[b_idx].astype(np.uint8)
    a = rng.integers(0, 2, size=d + 1).astype(np.uint8)
    want_win = rng.random() < _WIN_PROB
    target = _win_parity_target(x, y, a)
    if not want_win:
        target ^= 1
    b = rng.integers(0, 2, size=d + 1).astype(np.uint8)
    # x ends in 1, so the final bit can always absorb the parity constraint
    b[-1] = 0
    b[-1] = target ^ (int((x * b).sum()) % 2)
    return a, b


def honest_j_sample_batch(d: int, xs: np.ndarray, ys: np.ndarray,
                          rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized two-stage sampler; same distribution as honest_j_sample."""
    trials = xs.shape[0]
    a = rng.integers(0, 2, size=(trials, d + 1)).astype(np.int64)
    base = ((xs * (1 - 2 * a)) * ys).sum(axis=1) % 4
    target = np.where((base == 0) | (base == 1), 0, 1)
    target ^= (rng.random(trials) >= _WIN_PROB).astype(np.int64)
    b = rng.integers(0, 2, size=(trials, d + 1)).astype(np.int64)
    b[:, -1] = 0
    b[:, -1] = target ^ ((xs * b).sum(axis=1) % 2)
    return a.astype(np.uint8), b.astype(np.uint8)


# ---------------------------------------------------------------------------
# honest prover for the encrypted game

@dataclass(frozen=True)
class FirstRoundResult:
    w: ZqArray
    ells: np.ndarray          # bits indexed by positions kept in round one
    ell_positions: np.ndarray  # the 1-based bit positions those bits answer
    claw: ClawDescription
    event_e: bool
    event_f: bool


def round_one_positions(params: Params) -> np.ndarray:
    """1-based bit positions measured in round one: every position except the
    final (least significant) bit of each of the last d coordinates, which
    together with the coin qubit carry the claw."""
    n, q_bits, d = params.n, params.Q, params.d
    excluded = {(n - d + j) * q_bits for j in range(1, d + 1)}
    return np.array([p for p in range(1, n * q_bits + 1) if p not in excluded],
                    dtype=np.int64)


def honest_first_round(record: EncryptionRecord, params: Params,
                       rng: np.random.Generator) -> FirstRoundResult:
    """Prepare w = A r - c v + z, resolve the consistent preimages through
    the referee's trapdoor, and reduce the residual state to its claw.

    The event flags record whether both preimages sat inside the noise box
    (E) and whether no coordinate of the recovered preimage was smaller in
    balanced absolute value than the encryption offset (F).
    """
    q, n, m, tau, d = params.q, params.n, params.m, params.tau, params.d
    a, v = record.ciphertext.a, record.ciphertext.v
    r = rng.integers(0, q, size=n, dtype=np.int64)
    coin = int(rng.integers(0, 2))
    box = rng.integers(-tau, tau + 1, size=m, dtype=np.int64)
    w_vals = (matmul_mod(a.values, r, q) - coin * v.values + box) % q
    w = ZqArray(q, w_vals)

    z0 = invert(a, record.trapdoor, w, params)
    z1 = invert(a, record.trapdoor, w + v, params)
    in_box0 = z0 is not None and norminf((w.values - matmul_mod(a.values, z0, q)) % q, q) <= tau
    in_box1 = z1 is not None and norminf(
        ((w + v).values - matmul_mod(a.values, z1, q)) % q, q) <= tau
    event_e = in_box0 and in_box1
    event_f = bool(z0 is not None and
                   (balanced_abs(z0, q) > np.abs(record.gamma)).all())

    positions = round_one_positions(params)
    ells = rng.integers(0, 2, size=len(positions)).astype(np.uint8)

    def data_bits(z):
        return (z[n - d:] % 2).astype(np.uint8)

    if event_e:
        bits0 = binary_repr(z0, params.Q)
        bits1 = binary_repr(z1, params.Q)
        diff = (bits0 ^ bits1)[positions - 1]
        phase = 1 if int((ells & diff).sum()) % 2 == 0 else -1
        claw = ClawDescription(branch0=data_bits(z0), branch1=data_bits(z1),
                               phase=phase)
    elif in_box0:
        claw = ClawDescription(branch0=data_bits(z0), branch1=None)
    else:
        claw = ClawDescription(branch0=None, branch1=data_bits(z1))
    return FirstRoundResult(w=w, ells=ells, ell_positions=positions, claw=claw,
                            event_e=event_e, event_f=event_f)


def honest_second_round(claw: ClawDescription, y,
                        rng: np.random.Generator) -> np.ndarray:
    """Measure data qubit j in X or Y according to y_j, the coin qubit in
    the rotated XY basis; the d+1 outcome bits are the round-two answer."""
    y = np.asarray(y, dtype=np.uint8)
    d = claw.d
    if len(y) != d + 1 or y[-1] != 1:
        raise ValueError("round-two question is d+1 bits ending in 1")
    state = build_claw_state(claw)
    out = np.zeros(d + 1, dtype=np.uint8)
    for j in range(d):
        out[j], state = measure(state, j, "Y" if y[j] else "X", rng)
    out[d], state = measure(state, d, "XY", rng)
    return out
