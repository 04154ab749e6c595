"""The post queue: a three-region FIFO list of posted calls.

Posted calls live in a single sequence split into a high, a medium,
and a low region.  A new high-priority node is inserted right after
the last high node (at the front when there is none), a medium node
right after the last medium node (after the high region when there is
none), and a low node at the end.  Dispatch always removes the head,
so the observable order is: ascending priority rank, first-posted
first within a rank.

Lists are immutable; ``add`` and ``remove_first`` return new lists and
leave the receiver untouched.  ``OracleQueue`` is a deliberately naive
reference with the same interface (a flat bag dequeued by a stable
sort on ``(rank, seq)``) used to cross-check the region bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import Expr, Priority


class EmptyListError(Exception):
    """Raised when removing from an empty post queue."""


@dataclass(frozen=True)
class AsynchNode:
    """One posted call: target method, argument, and its post-time value.

    ``seq`` is a program-wide counter (first post is 1) that breaks
    priority ties first-come-first-served.
    """

    method: str
    arg_expr: Expr
    arg_value: int
    priority: Priority
    seq: int


@dataclass(frozen=True)
class AsynchList:
    """Post queue with explicit region-tail markers.

    ``high_tail`` / ``medium_tail`` are the positions of the last high
    and last medium node (None when that region is empty); they are
    maintained incrementally by ``add`` and ``remove_first`` and can be
    audited with ``check_invariants``.
    """

    nodes: tuple[AsynchNode, ...] = ()
    high_tail: int | None = None
    medium_tail: int | None = None

    @classmethod
    def empty(cls) -> "AsynchList":
        return cls()

    @property
    def first_marker(self) -> int | None:
        return 0 if self.nodes else None

    @property
    def current_marker(self) -> int | None:
        # Next node to dispatch is always the head.
        return self.first_marker

    def is_empty(self) -> bool:
        return not self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def to_sequence(self) -> tuple[AsynchNode, ...]:
        return self.nodes

    def add(self, node: AsynchNode) -> "AsynchList":
        """Insert a node at the tail of its priority region."""
        high_tail = self.high_tail
        medium_tail = self.medium_tail
        if node.priority is Priority.HIGH:
            pos = 0 if high_tail is None else high_tail + 1
            high_tail = pos
            # The medium region sits behind the high region, so it shifts.
            if medium_tail is not None:
                medium_tail += 1
        elif node.priority is Priority.MEDIUM:
            if medium_tail is not None:
                pos = medium_tail + 1
            elif high_tail is not None:
                pos = high_tail + 1
            else:
                pos = 0
            medium_tail = pos
        else:
            pos = len(self.nodes)
        nodes = self.nodes[:pos] + (node,) + self.nodes[pos:]
        return AsynchList(nodes, high_tail, medium_tail)

    def remove_first(self) -> tuple[AsynchNode, "AsynchList"]:
        """Remove and return the head node together with the remainder."""
        if not self.nodes:
            raise EmptyListError("remove from empty post list")
        head = self.nodes[0]
        high_tail = self.high_tail
        medium_tail = self.medium_tail
        high_tail = None if high_tail in (None, 0) else high_tail - 1
        medium_tail = None if medium_tail in (None, 0) else medium_tail - 1
        return head, AsynchList(self.nodes[1:], high_tail, medium_tail)

    def check_invariants(self) -> list[str]:
        """Audit region order, FIFO order, and marker coherence.

        Returns a list of violation descriptions; empty means the list
        is well formed.
        """
        violations = []
        ranks = [n.priority.rank for n in self.nodes]
        for i in range(1, len(ranks)):
            if ranks[i] < ranks[i - 1]:
                violations.append(f"priority regions out of order at position {i}")
        seqs = [n.seq for n in self.nodes]
        if len(set(seqs)) != len(seqs):
            violations.append("duplicate seq values")
        by_rank: dict[int, list[int]] = {}
        for n in self.nodes:
            by_rank.setdefault(n.priority.rank, []).append(n.seq)
        for rank, region_seqs in by_rank.items():
            if region_seqs != sorted(region_seqs):
                violations.append(f"rank-{rank} region is not in post order")
        expect_high = max((i for i, r in enumerate(ranks) if r == Priority.HIGH.rank),
                          default=None)
        expect_medium = max((i for i, r in enumerate(ranks) if r == Priority.MEDIUM.rank),
                            default=None)
        if self.high_tail != expect_high:
            violations.append(f"high_tail is {self.high_tail}, expected {expect_high}")
        if self.medium_tail != expect_medium:
            violations.append(f"medium_tail is {self.medium_tail}, expected {expect_medium}")
        return violations


@dataclass(frozen=True)
class OracleQueue:
    """Brute-force reference queue: a flat bag ordered on demand.

    Dequeue order is a stable ascending sort by ``(priority rank,
    seq)``, which is the whole behavioural contract of ``AsynchList``
    in one line.
    """

    entries: tuple[AsynchNode, ...] = ()

    @classmethod
    def empty(cls) -> "OracleQueue":
        return cls()

    def is_empty(self) -> bool:
        return not self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def to_sequence(self) -> tuple[AsynchNode, ...]:
        return tuple(sorted(self.entries, key=lambda n: (n.priority.rank, n.seq)))

    def add(self, node: AsynchNode) -> "OracleQueue":
        return OracleQueue(self.entries + (node,))

    def remove_first(self) -> tuple[AsynchNode, "OracleQueue"]:
        if not self.entries:
            raise EmptyListError("remove from empty post list")
        head = min(self.entries, key=lambda n: (n.priority.rank, n.seq))
        i = self.entries.index(head)
        return head, OracleQueue(self.entries[:i] + self.entries[i + 1:])
