"""Corpus data model, JSON-lines persistence, and the synthetic corpus generator.

A corpus is a list of patients, each a time-ordered sequence of coded visits over
a shared vocabulary of three-character ICD-10-style disease codes. The generator
plants comorbidity structure: codes are partitioned into clusters, patients lean
towards a primary cluster, and every within-cluster code pair is returned as a
labeled ground-truth pair.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .pairs import DiseasePair, PairList

SEX_CLASSES = 2
REGION_CLASSES = 10
BIRTH_YEAR_MIN = 1888
BIRTH_YEAR_MAX = 1998
BIRTH_YEAR_CLASSES = BIRTH_YEAR_MAX - BIRTH_YEAR_MIN + 1  # 111

# Synthetic corpora carry day offsets, not calendar dates; ages are measured
# from a fixed anchor so that the youngest possible patient has age zero at
# day offset zero.
AGE_ANCHOR_YEAR = 1998

DEFAULT_MIN_VISITS = 5

_MEAN_VISIT_GAP_DAYS = 30.0


class CorpusFormatError(ValueError):
    """A corpus file violates the JSON-lines contract."""


class ConceptVocabulary:
    """Ordered universe of disease codes; iteration order is lexicographic."""

    def __init__(self, codes):
        codes = tuple(codes)
        if not all(isinstance(c, str) and c for c in codes):
            raise ValueError("vocabulary codes must be non-empty strings")
        if len(set(codes)) != len(codes):
            raise ValueError("vocabulary codes must be unique")
        if list(codes) != sorted(codes):
            raise ValueError("vocabulary codes must be lexicographically sorted")
        self.codes = codes
        self._index = {c: i for i, c in enumerate(codes)}

    @classmethod
    def from_codes(cls, codes) -> "ConceptVocabulary":
        """Build from any iterable of codes, deduplicating and sorting."""
        return cls(sorted(set(codes)))

    def index(self, code: str) -> int:
        try:
            return self._index[code]
        except KeyError:
            raise KeyError(f"unknown code {code!r}") from None

    def __contains__(self, code):
        return code in self._index

    def __len__(self):
        return len(self.codes)

    def __iter__(self):
        return iter(self.codes)

    def __getitem__(self, i):
        return self.codes[i]

    def __eq__(self, other):
        return isinstance(other, ConceptVocabulary) and self.codes == other.codes

    def __repr__(self):
        return f"ConceptVocabulary({len(self.codes)} codes)"


@dataclass(frozen=True)
class Visit:
    """One coded encounter: a day offset plus the codes recorded that day."""

    date_offset_days: int
    codes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "codes", tuple(self.codes))
        if self.date_offset_days < 0:
            raise ValueError("date_offset_days must be non-negative")
        if not self.codes:
            raise ValueError("a visit must contain at least one code")
        if len(set(self.codes)) != len(self.codes):
            raise ValueError("duplicate code within a visit")


@dataclass(frozen=True)
class PatientRecord:
    """One individual's demographics plus time-ordered visits."""

    id: str
    sex: int
    region: int
    birth_year: int
    visits: tuple[Visit, ...]

    def __post_init__(self):
        object.__setattr__(self, "visits", tuple(self.visits))
        if not self.id:
            raise ValueError("patient id must be non-empty")
        if self.sex not in (0, 1):
            raise ValueError(f"sex must be 0 or 1, got {self.sex}")
        if not 0 <= self.region < REGION_CLASSES:
            raise ValueError(f"region must be in [0,{REGION_CLASSES}), got {self.region}")
        if not BIRTH_YEAR_MIN <= self.birth_year <= BIRTH_YEAR_MAX:
            raise ValueError(
                f"birth_year must be in [{BIRTH_YEAR_MIN},{BIRTH_YEAR_MAX}], got {self.birth_year}"
            )
        dates = [v.date_offset_days for v in self.visits]
        if any(b < a for a, b in zip(dates, dates[1:])):
            raise ValueError("non-monotonic visit dates")

    @property
    def n_visits(self) -> int:
        return len(self.visits)


@dataclass(frozen=True)
class Corpus:
    """A vocabulary plus the patient records coded against it."""

    vocabulary: ConceptVocabulary
    patients: tuple[PatientRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "patients", tuple(self.patients))
        nv = len(self.vocabulary)
        ids = set()
        for p in self.patients:
            if p.id in ids:
                raise ValueError(f"duplicate patient id {p.id!r}")
            ids.add(p.id)
            for v in p.visits:
                if any(not 0 <= c < nv for c in v.codes):
                    raise ValueError(f"patient {p.id!r} has a code index outside the vocabulary")

    @property
    def n_patients(self) -> int:
        return len(self.patients)


def age_days_at(patient: PatientRecord, visit: Visit) -> int:
    """Age in days at a visit, anchored so day 0 falls in AGE_ANCHOR_YEAR."""
    return (AGE_ANCHOR_YEAR - patient.birth_year) * 365 + visit.date_offset_days


def age_years_at(patient: PatientRecord, visit: Visit) -> int:
    return age_days_at(patient, visit) // 365


# ---------------------------------------------------------------------------
# JSON-lines persistence
# ---------------------------------------------------------------------------

_PATIENT_KEYS = ("id", "sex", "region", "birth_year", "visits")
_VISIT_KEYS = ("d", "codes")


def _patient_line(patient: PatientRecord, vocabulary: ConceptVocabulary) -> str:
    obj = {
        "id": patient.id,
        "sex": patient.sex,
        "region": patient.region,
        "birth_year": patient.birth_year,
        "visits": [
            {"d": v.date_offset_days, "codes": [vocabulary[c] for c in v.codes]}
            for v in patient.visits
        ],
    }
    return json.dumps(obj, separators=(",", ":"))


def corpus_to_bytes(corpus: Corpus) -> bytes:
    """Canonical serialization; also the input to the corpus fingerprint."""
    lines = [_patient_line(p, corpus.vocabulary) for p in corpus.patients]
    return ("".join(line + "\n" for line in lines)).encode("utf-8")


def corpus_fingerprint(corpus: Corpus) -> str:
    """64-bit content hash of the canonical serialization, as 16 hex characters."""
    return hashlib.sha256(corpus_to_bytes(corpus)).hexdigest()[:16]


def save_corpus(corpus: Corpus, path) -> None:
    """Write a corpus as UTF-8 JSON lines; byte-deterministic for a given corpus."""
    with open(path, "wb") as fh:
        fh.write(corpus_to_bytes(corpus))


def _require_int(value, what: str, lineno: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CorpusFormatError(f"line {lineno}: {what} must be an integer")
    return value


def _parse_patient(obj, lineno: int):
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"line {lineno}: expected a JSON object")
    unknown = set(obj) - set(_PATIENT_KEYS)
    if unknown:
        raise CorpusFormatError(f"line {lineno}: unknown keys {sorted(unknown)}")
    missing = set(_PATIENT_KEYS) - set(obj)
    if missing:
        raise CorpusFormatError(f"line {lineno}: missing keys {sorted(missing)}")
    pid = obj["id"]
    if not isinstance(pid, str) or not pid:
        raise CorpusFormatError(f"line {lineno}: id must be a non-empty string")
    if not isinstance(obj["visits"], list):
        raise CorpusFormatError(f"line {lineno}: visits must be a list")
    visits = []
    for v in obj["visits"]:
        if not isinstance(v, dict):
            raise CorpusFormatError(f"line {lineno}: each visit must be an object")
        vunknown = set(v) - set(_VISIT_KEYS)
        if vunknown:
            raise CorpusFormatError(f"line {lineno}: unknown visit keys {sorted(vunknown)}")
        if set(v) != set(_VISIT_KEYS):
            raise CorpusFormatError(f"line {lineno}: visit must have keys d and codes")
        d = _require_int(v["d"], "visit day", lineno)
        codes = v["codes"]
        if not isinstance(codes, list) or not all(isinstance(c, str) and c for c in codes):
            raise CorpusFormatError(f"line {lineno}: visit codes must be non-empty strings")
        visits.append((d, codes))
    return (
        pid,
        _require_int(obj["sex"], "sex", lineno),
        _require_int(obj["region"], "region", lineno),
        _require_int(obj["birth_year"], "birth_year", lineno),
        visits,
    )


def load_corpus(path, min_visits: int = DEFAULT_MIN_VISITS) -> Corpus:
    """Load and validate a JSON-lines corpus file.

    The vocabulary is the lexicographically sorted set of all codes observed in
    the file. Patients with fewer than ``min_visits`` visits are rejected, as
    are duplicate ids, decreasing visit dates, and any JSON outside the frozen
    per-line schema.
    """
    raw = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: malformed JSON ({exc.msg})") from None
            raw.append((lineno, _parse_patient(obj, lineno)))

    all_codes = set()
    for _, (_, _, _, _, visits) in raw:
        for _, codes in visits:
            all_codes.update(codes)
    vocabulary = ConceptVocabulary.from_codes(all_codes)

    patients = []
    for lineno, (pid, sex, region, birth_year, visits) in raw:
        if len(visits) < min_visits:
            raise CorpusFormatError(
                f"line {lineno}: patient {pid!r} has {len(visits)} visits; minimum is {min_visits}"
            )
        try:
            record = PatientRecord(
                id=pid,
                sex=sex,
                region=region,
                birth_year=birth_year,
                visits=tuple(
                    Visit(d, tuple(vocabulary.index(c) for c in codes)) for d, codes in visits
                ),
            )
        except ValueError as exc:
            raise CorpusFormatError(f"line {lineno}: patient {pid!r}: {exc}") from None
        patients.append(record)

    try:
        return Corpus(vocabulary=vocabulary, patients=tuple(patients))
    except ValueError as exc:
        raise CorpusFormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# Synthetic generator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorConfig:
    """Settings for the planted-cluster synthetic corpus.

    ``mean_visits`` and ``mean_codes_per_visit`` are the means of the realized
    distributions (shifted geometric with minimum 5; zero-truncated Poisson
    with minimum 1). ``cluster_affinity`` controls both how strongly a visit
    follows the patient's primary cluster and how strongly codes follow the
    visit's cluster; the complement is drawn from a global Zipf law.
    """

    n_patients: int = 1000
    vocab_size: int = 200
    n_clusters: int = 20
    cluster_affinity: float = 0.9
    mean_visits: float = 18.73
    mean_codes_per_visit: float = 1.36
    zipf_exponent: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_patients < 1:
            raise ValueError("n_patients must be positive")
        if not 1 <= self.vocab_size <= 2600:
            raise ValueError("vocab_size must be in [1, 2600] (three-character code space)")
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be positive")
        if self.n_clusters > self.vocab_size:
            raise ValueError("n_clusters must not exceed vocab_size")
        if not 0 < self.cluster_affinity <= 1:
            raise ValueError("cluster_affinity must be in (0, 1]")
        if self.mean_visits < DEFAULT_MIN_VISITS:
            raise ValueError(f"mean_visits must be at least {DEFAULT_MIN_VISITS}")
        if self.mean_codes_per_visit < 1:
            raise ValueError("mean_codes_per_visit must be at least 1")
        if self.zipf_exponent < 0:
            raise ValueError("zipf_exponent must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def synthetic_codes(n: int) -> list[str]:
    """The first n codes of the synthetic universe A00, A01, ..., Z99."""
    return [f"{chr(ord('A') + i // 100)}{i % 100:02d}" for i in range(n)]


def _truncated_poisson_rate(mean: float) -> float:
    """Solve lambda such that a zero-truncated Poisson has the given mean."""
    if mean <= 1.0:
        return 0.0
    lo, hi = 1e-12, max(2.0 * mean, 10.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid / (1.0 - math.exp(-mid)) < mean:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _draw_truncated_poisson(rng, lam: float) -> int:
    if lam <= 0.0:
        return 1
    while True:
        k = int(rng.poisson(lam))
        if k > 0:
            return k


def generate_corpus(cfg: GeneratorConfig) -> tuple[Corpus, PairList]:
    """Generate a corpus with planted comorbidity clusters.

    Returns the corpus together with the ground-truth pair list: every
    unordered within-cluster pair among the codes that actually appear,
    labeled source="planted", relation="comorbid". The vocabulary is
    restricted to observed codes so that save/load round-trips exactly.
    Identical configs (including seed) yield identical output.
    """
    rng = np.random.default_rng(cfg.seed)
    universe = synthetic_codes(cfg.vocab_size)
    blocks = np.array_split(np.arange(cfg.vocab_size), cfg.n_clusters)
    cluster_members = [blk.tolist() for blk in blocks]

    zipf_w = (np.arange(cfg.vocab_size) + 1.0) ** (-cfg.zipf_exponent)
    zipf_cum = np.cumsum(zipf_w / zipf_w.sum())

    lam = _truncated_poisson_rate(cfg.mean_codes_per_visit)
    p_visits = 1.0 / (cfg.mean_visits - 4.0)
    p_gap = 1.0 / _MEAN_VISIT_GAP_DAYS

    def draw_code(cluster: int) -> int:
        if rng.random() < cfg.cluster_affinity:
            members = cluster_members[cluster]
            return members[int(rng.integers(len(members)))]
        return int(np.searchsorted(zipf_cum, rng.random(), side="right"))

    raw_patients = []
    for i in range(cfg.n_patients):
        sex = int(rng.integers(SEX_CLASSES))
        region = int(rng.integers(REGION_CLASSES))
        birth_year = int(rng.integers(BIRTH_YEAR_MIN, BIRTH_YEAR_MAX + 1))
        n_visits = 4 + int(rng.geometric(p_visits))
        primary = int(rng.integers(cfg.n_clusters))
        day = 0
        visits = []
        for j in range(n_visits):
            if j > 0:
                day += int(rng.geometric(p_gap))
            if rng.random() < cfg.cluster_affinity:
                cluster = primary
            else:
                cluster = int(rng.integers(cfg.n_clusters))
            k = min(_draw_truncated_poisson(rng, lam), cfg.vocab_size)
            codes: list[int] = []
            for _ in range(k):
                code = None
                for _ in range(100):
                    cand = draw_code(cluster)
                    if cand not in codes:
                        code = cand
                        break
                if code is None:
                    # saturated draw; fall back to the first unused code
                    pool = cluster_members[cluster] + list(range(cfg.vocab_size))
                    code = next(c for c in pool if c not in codes)
                codes.append(code)
            visits.append((day, tuple(codes)))
        raw_patients.append((f"p{i + 1:06d}", sex, region, birth_year, visits))

    observed = sorted({c for _, _, _, _, vs in raw_patients for _, cs in vs for c in cs})
    remap = {old: new for new, old in enumerate(observed)}
    vocabulary = ConceptVocabulary([universe[i] for i in observed])

    patients = tuple(
        PatientRecord(
            id=pid,
            sex=sex,
            region=region,
            birth_year=birth_year,
            visits=tuple(Visit(d, tuple(remap[c] for c in cs)) for d, cs in vs),
        )
        for pid, sex, region, birth_year, vs in raw_patients
    )
    corpus = Corpus(vocabulary=vocabulary, patients=patients)

    observed_set = set(observed)
    pairs = []
    for members in cluster_members:
        present = [universe[c] for c in members if c in observed_set]
        for a in range(len(present)):
            for b in range(a + 1, len(present)):
                pairs.append(DiseasePair(present[a], present[b], "planted", "comorbid"))
    return corpus, PairList(pairs)


def planted_clusters(cfg: GeneratorConfig) -> list[list[str]]:
    """The generator's code clusters (full universe, by code string)."""
    universe = synthetic_codes(cfg.vocab_size)
    return [[universe[i] for i in blk] for blk in np.array_split(np.arange(cfg.vocab_size), cfg.n_clusters)]


def subsample_corpus(corpus: Corpus, fraction: float, seed: int) -> Corpus:
    """Seeded patient subsample without replacement, vocabulary re-derived.

    Patients keep their corpus order; the vocabulary shrinks to the codes the
    kept patients actually use, with visit indices remapped accordingly.
    """
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    n_keep = max(1, math.ceil(fraction * corpus.n_patients))
    if n_keep == corpus.n_patients:
        return corpus
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(corpus.n_patients, size=n_keep, replace=False))
    kept = [corpus.patients[i] for i in idx]

    observed = sorted({c for p in kept for v in p.visits for c in v.codes})
    remap = {old: new for new, old in enumerate(observed)}
    vocabulary = ConceptVocabulary([corpus.vocabulary[i] for i in observed])
    patients = tuple(
        PatientRecord(
            id=p.id,
            sex=p.sex,
            region=p.region,
            birth_year=p.birth_year,
            visits=tuple(Visit(v.date_offset_days, tuple(remap[c] for c in v.codes)) for v in p.visits),
        )
        for p in kept
    )
    return Corpus(vocabulary=vocabulary, patients=patients)


def corpus_stats(corpus: Corpus) -> dict:
    """Summary statistics in the shape of the usual cohort profile table."""
    visits_per_patient = np.array([p.n_visits for p in corpus.patients], dtype=float)
    codes_per_visit = np.array(
        [len(v.codes) for p in corpus.patients for v in p.visits], dtype=float
    )

    def _summary(x):
        if x.size == 0:
            return {"mean": 0.0, "sd": 0.0, "median": 0.0, "iqr": 0.0}
        sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
        q75, q25 = np.percentile(x, [75, 25])
        return {
            "mean": float(np.mean(x)),
            "sd": sd,
            "median": float(np.median(x)),
            "iqr": float(q75 - q25),
        }

    return {
        "n_patients": corpus.n_patients,
        "n_visits": int(visits_per_patient.sum()),
        "visits_per_patient": _summary(visits_per_patient),
        "n_codes": len(corpus.vocabulary),
        "codes_per_visit": _summary(codes_per_visit),
    }


def format_corpus_stats(stats: dict) -> str:
    vp = stats["visits_per_patient"]
    cv = stats["codes_per_visit"]
    rows = [
        ("Number of patients", f"{stats['n_patients']}"),
        ("Number of visits", f"{stats['n_visits']}"),
        ("Number of visits per patient, Mean (SD)", f"{vp['mean']:.2f} ({vp['sd']:.2f})"),
        ("Number of visits per patient, Median (IQR)", f"{vp['median']:.0f} ({vp['iqr']:.0f})"),
        ("Number of disease codes", f"{stats['n_codes']}"),
        ("Number of codes in a visit, Mean (SD)", f"{cv['mean']:.2f} ({cv['sd']:.2f})"),
        ("Number of codes in a visit, Median (IQR)", f"{cv['median']:.0f} ({cv['iqr']:.0f})"),
    ]
    width = max(len(r[0]) for r in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows) + "\n"
