"""Small deterministic backtracking helpers shared by the search modules."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Caps:
    """Budgets for the staged searches.

    ``max_steps`` bounds the total number of candidate inspections an
    operation may perform; ``stage_candidates`` bounds the backtracking
    inside a single construction stage.  Hitting a cap is a reported
    outcome, not a bug: constructions return a failure record naming the
    stage that starved.
    """

    max_steps: int = 500_000
    stage_candidates: int = 50_000

    def to_json(self) -> dict:
        return {"max_steps": self.max_steps, "stage_candidates": self.stage_candidates}

    @classmethod
    def from_json(cls, doc) -> "Caps":
        if doc is None:
            return cls()
        return cls(
            max_steps=int(doc.get("max_steps", cls.max_steps)),
            stage_candidates=int(doc.get("stage_candidates", cls.stage_candidates)),
        )


class BudgetExhausted(Exception):
    """Internal signal: a step budget ran out mid-scan."""


@dataclass
class StepBudget:
    """Counts work units; raises once the cap is crossed.

    The exception is internal; public entry points convert it into either
    a cap-exceeded error or a first-class failure report.
    """

    cap: int
    used: int = 0

    def spend(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.cap:
            raise BudgetExhausted(f"budget of {self.cap} steps exhausted")

    def remaining(self) -> int:
        return max(0, self.cap - self.used)


def first_assignment(slots, candidates, consistent, budget: StepBudget):
    """Depth-first search for the first full slot assignment, product order.

    ``slots`` is an ordered list of slot ids, ``candidates[slot]`` an
    ordered sequence of choices, and ``consistent(partial, slot, choice)``
    a predicate over the partial assignment built so far.  The first
    assignment found is the minimum in lexicographic product order (slots
    major to minor), which is what makes emitted witnesses canonical.
    Returns ``None`` when the space is exhausted without a solution.
    """
    if not slots:
        return {}
    assignment: dict = {}
    pointers = [0] * len(slots)
    depth = 0
    while True:
        slot = slots[depth]
        options = candidates[slot]
        idx = pointers[depth]
        advanced = False
        while idx < len(options):
            choice = options[idx]
            budget.spend()
            if consistent(assignment, slot, choice):
                assignment[slot] = choice
                pointers[depth] = idx + 1
                advanced = True
                break
            idx += 1
        if advanced:
            if depth + 1 == len(slots):
                return dict(assignment)
            depth += 1
            pointers[depth] = 0
            continue
        # exhausted this slot: backtrack
        pointers[depth] = 0
        depth -= 1
        if depth < 0:
            return None
        del assignment[slots[depth]]


def prefiltered_assignment(slots, candidates, consistent, budget: StepBudget):
    """``first_assignment`` after slot-local pruning.

    Requires a monotone predicate: a choice rejected against the empty
    partial assignment stays rejected against every larger one.  Each
    slot's candidate list is filtered against the empty assignment first;
    an empty filtered list fails the whole call immediately, which keeps
    independent-slot instances from backtracking exponentially.
    """
    filtered = {}
    for slot in slots:
        keep = []
        for choice in candidates[slot]:
            budget.spend()
            if consistent({}, slot, choice):
                keep.append(choice)
        if not keep:
            return None
        filtered[slot] = tuple(keep)
    return first_assignment(slots, filtered, consistent, budget)
