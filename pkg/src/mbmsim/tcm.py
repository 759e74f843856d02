"""Rate-6/8 trellis-coded modulation over GSM-MBM channel uses.

The convolutional code is feedforward with one shift register per input.
Octal entry g[i][j] is the tap polynomial from input i to output j over
m_i + 1 bits, most significant bit = oldest register cell, least
significant = current input. Each frame is terminated with zero-input
tail blocks that drive the encoder back to the all-zero state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadGenerator, LengthError, ShapeMismatch
from .signalset import SignalSet

DEFAULT_GENERATOR = (
    (1, 1, 1, 0, 0, 0, 1, 0),
    (3, 1, 2, 0, 0, 0, 0, 0),
    (2, 5, 5, 0, 0, 0, 0, 0),
    (0, 0, 0, 1, 1, 1, 0, 1),
    (0, 0, 0, 3, 1, 2, 0, 0),
    (0, 0, 0, 2, 5, 5, 0, 0),
)
TOTAL_MEMORY = 6
FRAME_USES = 20


@dataclass(frozen=True)
class ConvCode:
    """Feedforward convolutional code with precomputed trellis tables."""

    taps: tuple[tuple[int, ...], ...]  # binary tap masks, taps[i][j]
    memories: tuple[int, ...]  # shift-register length per input
    k: int  # input bits per step
    n: int  # output bits per step
    next_state: np.ndarray = None  # (states, inputs)
    out_label: np.ndarray = None  # (states, inputs)
    pred_state: np.ndarray = None  # (states, fan_in), sorted by state then input
    pred_input: np.ndarray = None
    pred_out: np.ndarray = None

    @property
    def n_states(self) -> int:
        return 2 ** sum(self.memories)

    @property
    def tail_blocks(self) -> int:
        return max(self.memories)


def _parse_octal_rows(octal_rows) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    taps, memories = [], []
    for row in octal_rows:
        masks = [int(str(g), 8) for g in row]
        memories.append(max(m.bit_length() for m in masks) - 1 if any(masks) else 0)
        taps.append(tuple(masks))
    return tuple(taps), tuple(memories)


def _step(state_regs: list[int], u_bits: list[int], code: ConvCode):
    out = 0
    new_regs = []
    for i, (reg, u) in enumerate(zip(state_regs, u_bits)):
        combined = (reg << 1) | u
        for j in range(code.n):
            if bin(code.taps[i][j] & combined).count("1") & 1:
                out ^= 1 << (code.n - 1 - j)
        new_regs.append(combined & ((1 << code.memories[i]) - 1))
    return new_regs, out


def _pack(regs: list[int], memories) -> int:
    s = 0
    for reg, m in zip(regs, memories):
        s = (s << m) | reg
    return s


def _unpack(state: int, memories) -> list[int]:
    regs = []
    for m in reversed(memories):
        regs.append(state & ((1 << m) - 1))
        state >>= m
    return regs[::-1]


def build_code(octal_rows=DEFAULT_GENERATOR) -> ConvCode:
    """Build the trellis; raises BadGenerator unless total memory is 6."""
    taps, memories = _parse_octal_rows(octal_rows)
    k, n = len(octal_rows), len(octal_rows[0])
    if sum(memories) != TOTAL_MEMORY:
        raise BadGenerator(f"generator implies memory {sum(memories)}, expected {TOTAL_MEMORY}")
    code = ConvCode(taps, memories, k, n)
    n_states, n_inputs = code.n_states, 2**k
    next_state = np.zeros((n_states, n_inputs), dtype=np.int64)
    out_label = np.zeros((n_states, n_inputs), dtype=np.int64)
    for s in range(n_states):
        regs = _unpack(s, memories)
        for u in range(n_inputs):
            u_bits = [(u >> (k - 1 - i)) & 1 for i in range(k)]
            new_regs, out = _step(regs, u_bits, code)
            next_state[s, u] = _pack(new_regs, memories)
            out_label[s, u] = out
    # fan-in lists per next state, sorted by (prev_state, input) so that
    # argmin over ties lands on the lowest-state predecessor
    fan_in = n_states * n_inputs // n_states
    pred_state = np.zeros((n_states, fan_in), dtype=np.int64)
    pred_input = np.zeros((n_states, fan_in), dtype=np.int64)
    pred_out = np.zeros((n_states, fan_in), dtype=np.int64)
    fill = [0] * n_states
    for s in range(n_states):
        for u in range(n_inputs):
            t = next_state[s, u]
            pred_state[t, fill[t]] = s
            pred_input[t, fill[t]] = u
            pred_out[t, fill[t]] = out_label[s, u]
            fill[t] += 1
    return ConvCode(taps, memories, k, n, next_state, out_label,
                    pred_state, pred_input, pred_out)


def tcm_encode(bits: str, code: ConvCode) -> str:
    """Encode and terminate; output has 8 bits per 6 input bits plus tail."""
    if len(bits) % code.k != 0:
        raise LengthError(f"input length must be a multiple of {code.k}")
    state = 0
    out_labels = []
    blocks = [int(bits[t * code.k : (t + 1) * code.k], 2) for t in range(len(bits) // code.k)]
    blocks += [0] * code.tail_blocks
    for u in blocks:
        out_labels.append(int(code.out_label[state, u]))
        state = int(code.next_state[state, u])
    return "".join(format(o, f"0{code.n}b") for o in out_labels)


def tcm_viterbi_decode(ys: np.ndarray, H: np.ndarray, sset: SignalSet,
                       sigma2: float, code: ConvCode) -> str:
    """ML sequence decoding over a terminated frame; returns the info bits.

    ys has one row per channel use. The branch metric of a trellis edge is
    the squared distance between that use's received vector and the signal
    set member labeled by the edge's coded output block.
    """
    ys = np.asarray(ys)
    if sset.eta != code.n:
        raise ShapeMismatch(f"signal set carries {sset.eta} bits per use, code emits {code.n}")
    if ys.ndim != 2 or ys.shape[1] != H.shape[0] or H.shape[1] != sset.matrix.shape[0]:
        raise ShapeMismatch("received frame, channel and signal set shapes disagree")
    T = ys.shape[0]
    if T <= code.tail_blocks:
        raise LengthError("frame shorter than the termination tail")
    rxp = H @ sset.matrix
    n_states = code.n_states
    metric = np.full(n_states, np.inf)
    metric[0] = 0.0
    backptr = np.zeros((T, n_states, 2), dtype=np.int64)
    rows = np.arange(n_states)
    for t in range(T):
        d2 = np.sum(np.abs(ys[t][:, None] - rxp) ** 2, axis=0)
        if t < T - code.tail_blocks:
            cand = metric[code.pred_state] + d2[code.pred_out]
            best = np.argmin(cand, axis=1)
            metric = cand[rows, best]
            backptr[t, :, 0] = code.pred_state[rows, best]
            backptr[t, :, 1] = code.pred_input[rows, best]
        else:
            # tail steps admit only the zero input; ascending scan keeps
            # the lowest-state predecessor on ties
            scores = metric + d2[code.out_label[:, 0]]
            metric = np.full(n_states, np.inf)
            for s in range(n_states):
                nxt = code.next_state[s, 0]
                if scores[s] < metric[nxt]:
                    metric[nxt] = scores[s]
                    backptr[t, nxt] = (s, 0)
    state = 0  # terminated frames end in the zero state
    inputs = []
    for t in range(T - 1, -1, -1):
        prev, u = backptr[t, state]
        inputs.append(int(u))
        state = int(prev)
    inputs = inputs[::-1][: T - code.tail_blocks]
    return "".join(format(u, f"0{code.k}b") for u in inputs)
