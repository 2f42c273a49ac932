"""Questionnaire data handling: parsing, encoding, targets and synthesis.

A cohort is a list of :class:`StudentRecord`, each holding 16 multi-select
answers encoded as binary flag vectors over the four styles A, V, K, R.
From a cohort we derive per-student probability targets, dominant labels,
and the four per-style design matrices that feed the learners.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum

import numpy as np

N_QUESTIONS = 16


class Style(Enum):
    """The four learning styles, in the canonical vector order A, V, K, R."""

    A = 0
    V = 1
    K = 2
    R = 3

    @property
    def index(self) -> int:
        return self.value


#: Canonical ordering used for all vector layouts and tie-breaking.
STYLES = (Style.A, Style.V, Style.K, Style.R)
STYLE_LETTERS = "AVKR"


class DatasetError(ValueError):
    """Base class for cohort data errors."""


class MissingQuestion(DatasetError):
    def __init__(self, row: int, expected: int, got: int):
        super().__init__(f"row {row}: expected {expected} answer cells, got {got}")
        self.row = row


class InvalidToken(DatasetError):
    def __init__(self, row: int, question: int, token: str):
        super().__init__(f"row {row}, Q{question}: invalid style token {token!r}")
        self.row = row
        self.question = question


class EmptyAnswer(DatasetError):
    def __init__(self, row: int, question: int):
        super().__init__(f"row {row}, Q{question}: answer selects no style")
        self.row = row
        self.question = question


class DuplicateId(DatasetError):
    def __init__(self, row: int, student_id: str):
        super().__init__(f"row {row}: duplicate student id {student_id!r}")
        self.row = row
        self.student_id = student_id


class EmptyDataset(DatasetError):
    pass


@dataclass(frozen=True)
class ResponseVector:
    """Binary flags for one answer, one flag per style in A, V, K, R order."""

    a: int
    v: int
    k: int
    r: int

    def __post_init__(self):
        for flag in (self.a, self.v, self.k, self.r):
            if flag not in (0, 1):
                raise DatasetError(f"response flags must be 0 or 1, got {flag!r}")
        if self.a + self.v + self.k + self.r == 0:
            raise DatasetError("response must select at least one style")

    def flags(self) -> tuple[int, int, int, int]:
        return (self.a, self.v, self.k, self.r)

    def flag(self, style: Style) -> int:
        return self.flags()[style.index]

    @classmethod
    def from_styles(cls, styles) -> "ResponseVector":
        chosen = set(styles)
        return cls(*(1 if s in chosen else 0 for s in STYLES))

    def to_cell(self) -> str:
        """Letters of the selected styles in canonical order, e.g. ``AVR``."""
        return "".join(STYLE_LETTERS[i] for i, f in enumerate(self.flags()) if f)


@dataclass(frozen=True)
class StudentRecord:
    id: str
    responses: tuple[ResponseVector, ...]

    def __post_init__(self):
        if len(self.responses) != N_QUESTIONS:
            raise DatasetError(
                f"student {self.id!r}: expected {N_QUESTIONS} responses, "
                f"got {len(self.responses)}"
            )


@dataclass(frozen=True)
class StyleProbabilities:
    """Point on the 4-simplex, indexed by style in canonical order."""

    p: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.p) != 4:
            raise DatasetError("need exactly four probabilities")
        if any(x < 0 for x in self.p):
            raise DatasetError(f"negative probability in {self.p}")
        if abs(sum(self.p) - 1.0) > 1e-9:
            raise DatasetError(f"probabilities sum to {sum(self.p)!r}, not 1")

    def __getitem__(self, style: Style) -> float:
        return self.p[style.index]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float)


@dataclass(frozen=True)
class StyleMatrix:
    """Design matrix for one style plus the shared regression/label outputs.

    ``features[i, q]`` is the flag of ``style`` in student i's answer to
    question q.  ``prob_targets`` and ``labels`` are identical across the
    four matrices built from one cohort.
    """

    style: Style
    features: np.ndarray  # (N, 16) float binary
    prob_targets: tuple[StyleProbabilities, ...]
    labels: tuple[Style, ...]

    @property
    def n_students(self) -> int:
        return self.features.shape[0]

    def target_column(self, style: Style) -> np.ndarray:
        """Probability-of-``style`` regression target vector."""
        return np.array([p[style] for p in self.prob_targets], dtype=float)

    def label_indices(self) -> np.ndarray:
        return np.array([s.index for s in self.labels], dtype=int)


@dataclass(frozen=True)
class SynthConfig:
    """Settings for the synthetic cohort generator.

    ``concentration`` is the Dirichlet prior over per-student style
    propensities; ``multi_select_rate`` is the chance a question receives a
    second, distinct style on top of the primary one.
    """

    n_students: int
    concentration: tuple[float, float, float, float] = (2.0, 2.0, 2.0, 2.0)
    multi_select_rate: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.n_students < 2:
            raise DatasetError("n_students must be at least 2")
        if len(self.concentration) != 4 or any(c <= 0 for c in self.concentration):
            raise DatasetError("concentration must be four positive reals")
        if not 0.0 <= self.multi_select_rate <= 1.0:
            raise DatasetError("multi_select_rate must be in [0, 1]")
        if self.seed < 0:
            raise DatasetError("seed must be non-negative")


def _parse_cell(cell: str, row: int, question: int) -> ResponseVector:
    text = cell.strip().upper().replace("|", "")
    if not text:
        raise EmptyAnswer(row, question)
    flags = [0, 0, 0, 0]
    for ch in text:
        idx = STYLE_LETTERS.find(ch)
        if idx < 0:
            raise InvalidToken(row, question, ch)
        flags[idx] = 1
    return ResponseVector(*flags)


def parse_responses(csv_text: str) -> list[StudentRecord]:
    """Parse cohort CSV into validated records, preserving row order.

    Expected layout: header ``id,Q1,...,Q16``; each answer cell a non-empty
    subset of {A,V,K,R} written as concatenated letters (``AK``), optionally
    ``|``-separated, case-insensitive.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("input has no header row") from None
    if len(header) != N_QUESTIONS + 1:
        raise MissingQuestion(0, N_QUESTIONS + 1, len(header))

    records = []
    seen_ids = set()
    for row_idx, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != N_QUESTIONS + 1:
            raise MissingQuestion(row_idx, N_QUESTIONS + 1, len(row))
        student_id = row[0].strip()
        if student_id in seen_ids:
            raise DuplicateId(row_idx, student_id)
        seen_ids.add(student_id)
        responses = tuple(
            _parse_cell(cell, row_idx, q) for q, cell in enumerate(row[1:], start=1)
        )
        records.append(StudentRecord(id=student_id, responses=responses))
    if not records:
        raise EmptyDataset("input has a header but no student rows")
    return records


def serialize_responses(records) -> str:
    """Render records back to the CSV format, LF line endings.

    Round-trips exactly: ``parse_responses(serialize_responses(r)) == r``.
    """
    lines = ["id," + ",".join(f"Q{q}" for q in range(1, N_QUESTIONS + 1))]
    for rec in records:
        lines.append(rec.id + "," + ",".join(rv.to_cell() for rv in rec.responses))
    return "\n".join(lines) + "\n"


def compute_probabilities(record: StudentRecord) -> StyleProbabilities:
    """Per-style fraction of all flags the student set across 16 answers."""
    counts = [0, 0, 0, 0]
    for rv in record.responses:
        for i, f in enumerate(rv.flags()):
            counts[i] += f
    total = sum(counts)
    return StyleProbabilities(tuple(c / total for c in counts))


def derive_label(probs: StyleProbabilities) -> Style:
    """Argmax style; ties go to the earliest style in canonical order."""
    best = Style.A
    for s in STYLES[1:]:
        if probs[s] > probs[best]:
            best = s
    return best


def build_style_matrices(records) -> tuple[StyleMatrix, StyleMatrix, StyleMatrix, StyleMatrix]:
    """Split a cohort into the four per-style design matrices.

    The probability targets and labels are computed once and shared by all
    four matrices.
    """
    records = list(records)
    if not records:
        raise EmptyDataset("cannot build matrices from an empty cohort")
    probs = tuple(compute_probabilities(r) for r in records)
    labels = tuple(derive_label(p) for p in probs)
    matrices = []
    for style in STYLES:
        feats = np.array(
            [[rv.flag(style) for rv in rec.responses] for rec in records],
            dtype=float,
        )
        matrices.append(
            StyleMatrix(style=style, features=feats, prob_targets=probs, labels=labels)
        )
    return tuple(matrices)


def reassemble_records(matrices, ids) -> list[StudentRecord]:
    """Union the four matrices' cells back into ResponseVectors.

    Inverse of :func:`build_style_matrices` given the original ids.
    """
    by_style = {m.style: m for m in matrices}
    n = by_style[Style.A].n_students
    records = []
    for i in range(n):
        responses = tuple(
            ResponseVector(*(int(by_style[s].features[i, q]) for s in STYLES))
            for q in range(N_QUESTIONS)
        )
        records.append(StudentRecord(id=ids[i], responses=responses))
    return records


def synthesize(config: SynthConfig) -> list[StudentRecord]:
    """Generate a deterministic synthetic cohort.

    Each student draws a latent style propensity from the Dirichlet prior;
    each question then selects the propensity-sampled primary style plus,
    with probability ``multi_select_rate``, one additional distinct style
    sampled from the remaining three by renormalized propensity.
    """
    rng = np.random.default_rng(config.seed)
    conc = np.asarray(config.concentration, dtype=float)
    records = []
    for i in range(config.n_students):
        propensity = rng.dirichlet(conc)
        responses = []
        for _ in range(N_QUESTIONS):
            flags = [0, 0, 0, 0]
            primary = int(rng.choice(4, p=propensity))
            flags[primary] = 1
            if rng.random() < config.multi_select_rate:
                rest = [s for s in range(4) if s != primary]
                w = propensity[rest]
                extra = int(rng.choice(rest, p=w / w.sum()))
                flags[extra] = 1
            responses.append(ResponseVector(*flags))
        records.append(StudentRecord(id=f"S{i + 1}", responses=tuple(responses)))
    return records
