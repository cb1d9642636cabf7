"""Approximating a target unitary by products drawn from a finite gate set.

The search is iterative-deepening breadth-first enumeration of gate products
with a visited-net prune: two partial products within ``net_radius`` of each
other (phase-invariant distance) are merged, keeping the one found first,
which is always the shorter or lexicographically earlier one. The net radius
is therefore the documented completeness resolution: a negative answer
certifies that nothing in the visited net beat the requested precision, not
that no sequence exists.

Ties between equally good sequences are broken toward shorter length, then
lexicographically smaller symbols (in application order), so single-threaded
searches are fully deterministic.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import ContractError
from .linalg import Operator, phase_invariant_distance
from .tape import Tape


@dataclass(frozen=True, eq=False)
class GateSet:
    """A finite family of same-dimension unitary gates, one per tape symbol."""

    gates: tuple[Operator, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        gates = tuple(self.gates)
        if not gates:
            raise ContractError("a gate set needs at least one gate")
        dim = gates[0].dim
        for l, gate in enumerate(gates):
            if gate.dim != dim:
                raise ContractError(f"gate {l} has dim {gate.dim}, expected {dim}")
            if not gate.is_unitary:
                raise ContractError(f"gate {l} is not unitary (residual {gate.unitary_residual:.3e})")
        labels = tuple(self.labels) or tuple(f"g{l}" for l in range(len(gates)))
        if len(labels) != len(gates):
            raise ContractError(f"got {len(labels)} labels for {len(gates)} gates")
        if len(set(labels)) != len(labels):
            raise ContractError("gate labels must be unique")
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.gates)

    @property
    def dim(self) -> int:
        return self.gates[0].dim


@dataclass(frozen=True, eq=False)
class ApproxResult:
    """Best product found by a search.

    ``symbols`` is in application order: symbols[0] selects the gate applied
    first. The equivalent tape lists cells most-significant-first, i.e.
    reversed. An empty ``symbols`` denotes the identity (empty product).
    """

    symbols: tuple[int, ...]
    achieved_distance: float
    target: Operator
    expansions: int

    def tape(self, alphabet_size: int) -> Tape:
        if not self.symbols:
            raise ContractError("the empty sequence has no tape form (a tape needs >= 1 cell)")
        return Tape(alphabet_size, tuple(reversed(self.symbols)))


def rotation_z(theta: float) -> Operator:
    return Operator(np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]))


def rotation_x(theta: float) -> Operator:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return Operator(np.array([[c, -1j * s], [-1j * s, c]]))


def rotation_y(theta: float) -> Operator:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return Operator(np.array([[c, -s], [s, c]]))


GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0


def default_gate_set() -> GateSet:
    """Two single-qubit rotations by an irrational multiple of 2π.

    Irrational rotation angles about two orthogonal axes generate a dense
    subgroup of the single-qubit unitaries, so products of these two gates
    can come arbitrarily close to any target given enough length.
    """
    theta = 2.0 * np.pi * GOLDEN_RATIO
    return GateSet((rotation_z(theta), rotation_x(theta)), ("rz", "rx"))


def sequence_unitary(t: Tape, g: GateSet) -> Operator:
    """Ordered product selected by the tape: cell 1's gate acts first."""
    if t.alphabet_size != g.n:
        raise ContractError(
            f"tape alphabet {t.alphabet_size} does not match gate set size {g.n}"
        )
    matrix = np.eye(g.dim, dtype=complex)
    for c in t.cells:
        matrix = matrix @ g.gates[c].entries
    product = Operator(matrix)
    if not product.is_unitary_within(max(config.UNITARY_TOL, t.length * 1e-13)):
        raise ContractError(
            f"product of {t.length} gates drifted from unitarity "
            f"(residual {product.unitary_residual:.3e})"
        )
    return product


def product_operator(symbols, g: GateSet) -> Operator:
    """Product of gates in application order; the empty product is the identity."""
    matrix = np.eye(g.dim, dtype=complex)
    for c in symbols:
        matrix = g.gates[c].entries @ matrix
    return Operator(matrix)


def recomputed_distance(result: ApproxResult, g: GateSet) -> float:
    """Independently recompute the result's distance from its symbols."""
    return phase_invariant_distance(product_operator(result.symbols, g), result.target)


class _VisitedNet:
    """Partial products kept so far; anything within the radius of one is merged."""

    def __init__(self, dim: int, radius: float):
        # d(A,B) <= r  <=>  |tr(A†B)| >= dim·(1 − r²)
        self._threshold = dim * (1.0 - radius * radius)
        self._buf = np.empty((256, dim * dim), dtype=complex)
        self._count = 0

    def covers(self, flat: np.ndarray) -> bool:
        if self._count == 0:
            return False
        overlaps = np.abs(self._buf[: self._count] @ flat.conj())
        return bool(overlaps.max() >= self._threshold)

    def add(self, flat: np.ndarray) -> None:
        if self._count == self._buf.shape[0]:
            grown = np.empty((2 * self._buf.shape[0], self._buf.shape[1]), dtype=complex)
            grown[: self._count] = self._buf[: self._count]
            self._buf = grown
        self._buf[self._count] = flat
        self._count += 1


def _expand_chunk(chunk, gate_mats, target_flat, dim):
    out = []
    for matrix, seq in chunk:
        for l, gate in enumerate(gate_mats):
            product = gate @ matrix
            flat = product.reshape(-1)
            overlap = abs(np.vdot(flat, target_flat)) / dim
            dist = float(np.sqrt(max(0.0, 1.0 - overlap)))
            out.append((product, seq + (l,), flat, dist))
    return out


def best_approximation(
    target: Operator,
    g: GateSet,
    max_len: int,
    *,
    epsilon: float | None = None,
    net_radius: float | None = None,
    workers: int = 1,
) -> ApproxResult:
    """Best product of length ≤ max_len, by level-by-level enumeration.

    With ``epsilon`` set, the search stops after the first level at which the
    best distance so far reaches epsilon (finishing that level, so the result
    is the shortest such sequence). With ``workers > 1`` frontier chunks are
    expanded concurrently and merge order is no longer deterministic.
    """
    if not target.is_unitary:
        raise ContractError("approximation target must be unitary")
    if target.dim != g.dim:
        raise ContractError(f"target dim {target.dim} does not match gate dim {g.dim}")
    if max_len < 1:
        raise ContractError(f"max_len must be at least 1, got {max_len}")
    radius = config.DEFAULT_NET_RADIUS if net_radius is None else float(net_radius)
    if radius <= 0.0:
        raise ContractError(f"net radius must be positive, got {radius}")

    dim = g.dim
    gate_mats = [gate.entries for gate in g.gates]
    target_flat = target.entries.reshape(-1)

    def distance_of(flat: np.ndarray) -> float:
        overlap = abs(np.vdot(flat, target_flat)) / dim
        return float(np.sqrt(max(0.0, 1.0 - overlap)))

    root = np.eye(dim, dtype=complex)
    net = _VisitedNet(dim, radius)
    net.add(root.reshape(-1))
    best_seq: tuple[int, ...] = ()
    best_dist = distance_of(root.reshape(-1))
    expansions = 1
    frontier: list[tuple[np.ndarray, tuple[int, ...]]] = [(root, ())]

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for _ in range(max_len):
            if epsilon is not None and best_dist <= epsilon:
                break
            if not frontier:
                break
            if pool is None:
                produced = _expand_chunk(frontier, gate_mats, target_flat, dim)
            else:
                step = max(1, len(frontier) // (4 * workers))
                chunks = [frontier[i : i + step] for i in range(0, len(frontier), step)]
                futures = [
                    pool.submit(_expand_chunk, chunk, gate_mats, target_flat, dim)
                    for chunk in chunks
                ]
                produced = []
                for future in as_completed(futures):
                    produced.extend(future.result())
            next_frontier = []
            for product, seq, flat, dist in produced:
                expansions += 1
                if (dist, len(seq), seq) < (best_dist, len(best_seq), best_seq):
                    best_dist, best_seq = dist, seq
                if not net.covers(flat):
                    net.add(flat)
                    next_frontier.append((product, seq))
            frontier = next_frontier
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    return ApproxResult(
        symbols=best_seq,
        achieved_distance=best_dist,
        target=target,
        expansions=expansions,
    )


def approximate(
    target: Operator,
    g: GateSet,
    epsilon: float,
    max_len: int,
    *,
    net_radius: float | None = None,
    workers: int = 1,
) -> ApproxResult | None:
    """Shortest-first search for a product within epsilon of the target.

    Returns None when nothing in the visited net reached epsilon by max_len;
    that certifies failure only up to the net's resolution.
    """
    if not epsilon > 0.0:
        raise ContractError(f"epsilon must be positive, got {epsilon}")
    result = best_approximation(
        target, g, max_len, epsilon=epsilon, net_radius=net_radius, workers=workers
    )
    if result.achieved_distance <= epsilon:
        return result
    return None


# -- JSON wire format ---------------------------------------------------------


def gate_set_to_json(g: GateSet) -> dict:
    from .linalg import operator_to_json

    return {
        "dim": g.dim,
        "labels": list(g.labels),
        "gates": [operator_to_json(gate) for gate in g.gates],
    }


def gate_set_from_json(obj) -> GateSet:
    from .errors import InputError
    from .linalg import operator_from_json

    if not isinstance(obj, dict) or "gates" not in obj:
        raise InputError("gate set: expected a JSON object with a 'gates' key")
    gates = obj["gates"]
    if not isinstance(gates, list) or not gates:
        raise InputError("gate set: 'gates' must be a non-empty list")
    labels = obj.get("labels", [])
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise InputError("gate set: 'labels' must be a list of strings")
    try:
        result = GateSet(tuple(operator_from_json(g) for g in gates), tuple(labels))
    except ContractError as exc:
        raise InputError(f"gate set: {exc}") from exc
    if "dim" in obj and obj["dim"] != result.dim:
        raise InputError(f"gate set: dim={obj['dim']} inconsistent with gates ({result.dim})")
    return result


def approx_result_to_json(result: ApproxResult, g: GateSet) -> dict:
    from .tape import format_tape

    return {
        "symbols": list(result.symbols),
        "labels": [g.labels[c] for c in result.symbols],
        "tape": format_tape(result.tape(g.n)) if result.symbols else None,
        "achieved_distance": result.achieved_distance,
        "length": len(result.symbols),
        "expansions": result.expansions,
    }
