"""Random weight models, seeded randomness, jitter, and the lower-bound instance"""
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateSitePairError, ModelSpecError
from .geometry import Box, Point, Site
from .prefix_cells import Ordering

logger = logging.getLogger(__name__)

UNIT_SQUARE = Box(0.0, 0.0, 1.0, 1.0)


@dataclass(frozen=True)
class Rng:
    """A master seed plus a derivation path; the same pair always yields the same stream"""
    master_seed: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if self.master_seed < 0 or any(k < 0 for k in self.path):
            raise ValueError("seeds and derivation keys must be nonnegative")

    def child(self, *keys: int) -> "Rng":
        return Rng(self.master_seed, self.path + tuple(keys))

    def for_trial(self, n: int, trial: int) -> "Rng":
        return Rng(self.master_seed, (n, trial))

    @property
    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence([self.master_seed, *self.path])

    @property
    def seed(self) -> int:
        """64-bit seed derived from the path, as recorded in trial output"""
        return int(self.sequence.generate_state(1, dtype=np.uint64)[0])

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.sequence)


class WeightModel:
    """Draws n positive weights; subclasses describe themselves with a one-token spec"""
    samples_locations = False

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def draw(self, n: int, gen: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    @property
    def equal_nominal_weights(self) -> bool:
        return False


@dataclass(frozen=True)
class IIDUniform(WeightModel):
    a: float
    b: float

    def __post_init__(self):
        if not 0 <= self.a < self.b:
            raise ModelSpecError(f"uniform weights need 0 <= a < b, got a={self.a} b={self.b}")

    @property
    def spec(self) -> str:
        return f"iid:uniform:{self.a:g}:{self.b:g}"

    def draw(self, n, gen):
        #Draws from (a, b] so a = 0 still gives positive weights
        return self.b - (self.b - self.a) * gen.random(n)


@dataclass(frozen=True)
class IIDExponential(WeightModel):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ModelSpecError(f"exponential rate must be positive, got {self.rate}")

    @property
    def spec(self) -> str:
        return f"iid:exp:{self.rate:g}"

    def draw(self, n, gen):
        return np.maximum(gen.exponential(1.0 / self.rate, n), np.finfo(float).tiny)


@dataclass(frozen=True)
class IIDDiscrete(WeightModel):
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values or any(not v > 0 for v in self.values):
            raise ModelSpecError(f"discrete weights must be positive and nonempty, got {self.values}")

    @property
    def spec(self) -> str:
        return "iid:discrete:" + ",".join(f"{v:g}" for v in self.values)

    @property
    def equal_nominal_weights(self) -> bool:
        return len(set(self.values)) == 1

    def draw(self, n, gen):
        return gen.choice(np.array(self.values, dtype=float), size=n)


@dataclass(frozen=True)
class PermutedMultiset(WeightModel):
    weights: tuple[float, ...]

    def __post_init__(self):
        if not self.weights or any(not w > 0 for w in self.weights):
            raise ModelSpecError(f"multiset weights must be positive and nonempty, got {self.weights}")

    @property
    def spec(self) -> str:
        return "permuted:" + ",".join(f"{w:g}" for w in self.weights)

    @property
    def equal_nominal_weights(self) -> bool:
        return True

    def draw(self, n, gen):
        if n != len(self.weights):
            raise ModelSpecError(f"multiset holds {len(self.weights)} weights for {n} sites")
        return gen.permutation(np.array(self.weights, dtype=float))


@dataclass(frozen=True)
class PermutedLinear(WeightModel):
    """The multiset {1, ..., n} in random order"""

    @property
    def spec(self) -> str:
        return "permuted:linear"

    @property
    def equal_nominal_weights(self) -> bool:
        return True

    def draw(self, n, gen):
        return gen.permutation(np.arange(1, n + 1, dtype=float))


@dataclass(frozen=True)
class FixedWeightsSampledLocations(WeightModel):
    """Given weights (1..n when absent) on locations sampled uniformly from region"""
    weights: tuple[float, ...] | None = None
    region: Box = field(default=UNIT_SQUARE)
    samples_locations = True

    def __post_init__(self):
        if self.weights is not None and any(not w > 0 for w in self.weights):
            raise ModelSpecError("fixed weights must be positive")

    @property
    def spec(self) -> str:
        return "locations:unit-square"

    def draw(self, n, gen):
        if self.weights is None:
            return np.arange(1, n + 1, dtype=float)
        if n != len(self.weights):
            raise ModelSpecError(f"{len(self.weights)} fixed weights for {n} sites")
        return np.array(self.weights, dtype=float)

    def sample_locations(self, n: int, gen: np.random.Generator) -> list[Point]:
        return uniform_locations(n, gen, self.region)


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ModelSpecError(f"bad number list '{text}'") from None


def parse_model(spec: str) -> WeightModel:
    """Parse iid:uniform:a:b, iid:exp:lambda, iid:discrete:v1,..., permuted:v1,..., permuted:linear, locations:unit-square"""
    parts = spec.strip().split(":")
    try:
        match parts:
            case ["iid", "uniform", a, b]:
                return IIDUniform(float(a), float(b))
            case ["iid", "exp", rate]:
                return IIDExponential(float(rate))
            case ["iid", "discrete", values]:
                return IIDDiscrete(_floats(values))
            case ["permuted", "linear"]:
                return PermutedLinear()
            case ["permuted", values]:
                return PermutedMultiset(_floats(values))
            case ["locations", "unit-square"]:
                return FixedWeightsSampledLocations()
    except ModelSpecError:
        raise
    except ValueError:
        raise ModelSpecError(f"bad number in model spec '{spec}'") from None
    raise ModelSpecError(f"unknown model spec '{spec}'")


def uniform_locations(n: int, gen: np.random.Generator, region: Box = UNIT_SQUARE) -> list[Point]:
    xy = gen.random((n, 2))
    return [Point(region.xmin + x * region.width, region.ymin + y * region.height) for x, y in xy]


def ordering_from_weights(locations: Sequence[Point], weights: Sequence[float],
                          tiebreaks: Sequence[float] | None = None) -> Ordering:
    if len(locations) != len(weights):
        raise ModelSpecError(f"{len(weights)} weights for {len(locations)} locations")
    tiebreaks = tiebreaks if tiebreaks is not None else [0.0] * len(locations)
    try:
        return Ordering.from_sites(Site(p, float(w), 0, float(t)) for p, w, t in zip(locations, weights, tiebreaks))
    except ValueError as e:
        raise ModelSpecError(str(e)) from None


def sample_ordering(locations: Sequence[Point], model: WeightModel, rng: Rng | np.random.Generator) -> Ordering:
    """Draw weights and uniform tiebreaks, then rank sites by (weight, tiebreak)"""
    gen = rng.generator() if isinstance(rng, Rng) else rng
    if model.samples_locations:
        locations = model.sample_locations(len(locations), gen)
    if len({p.as_tuple() for p in locations}) != len(locations):
        raise DegenerateSitePairError("coincident site locations")
    weights = model.draw(len(locations), gen)
    tiebreaks = gen.random(len(locations))
    return ordering_from_weights(locations, weights, tiebreaks)


def two_row_instance(n: int) -> list[Point]:
    """Two rows of n points, (i, -D) then (i, +D) for i = 1..n, with D = 10 n^3"""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    delta = 10.0 * n ** 3
    return [Point(float(i), -delta) for i in range(1, n + 1)] + [Point(float(i), delta) for i in range(1, n + 1)]


def harmonic_number(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


def two_row_lower_bound(n: int) -> float:
    """(n/64)(H_{floor(n/20)} - H_{10 ceil(lg n)}); useful only where positive"""
    beta = 10 * math.ceil(math.log2(n)) if n > 1 else 0
    return n / 64.0 * (harmonic_number(n // 20) - harmonic_number(beta))


def isolated_insertions(ord: Ordering, n: int) -> list[int]:
    """Insertion indices j whose column has no earlier site within ceil(n / 8j) columns on either row"""
    columns = np.rint(ord.locations[:, 0]).astype(int)
    isolated = []
    for j in range(1, len(ord) + 1):
        xi = math.ceil(n / (8 * j))
        earlier = columns[: j - 1]
        if not np.any(np.abs(earlier - columns[j - 1]) <= xi):
            isolated.append(j)
    return isolated


def prefix_minima_count(values: Sequence[float]) -> int:
    """Number of strict prefix minima; values must be pairwise distinct"""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ModelSpecError("prefix minima need at least one value")
    if len(np.unique(v)) != len(v):
        raise ModelSpecError("prefix minima need distinct values")
    running = np.minimum.accumulate(v)
    return 1 + int(np.count_nonzero(v[1:] < running[:-1]))


def jitter(locations: Sequence[Point], magnitude: float, rng: Rng | np.random.Generator) -> list[Point]:
    """Independent uniform perturbation in [-magnitude, magnitude]^2 per point"""
    xy = np.array([p.as_tuple() for p in locations], dtype=float).reshape(-1, 2)
    scale = float(np.hypot(*(xy.max(axis=0) - xy.min(axis=0)))) if len(xy) > 1 else 1.0
    scale = scale or 1.0
    if not magnitude >= 1e-9 * scale:
        raise ModelSpecError(f"jitter magnitude {magnitude} below the minimum {1e-9 * scale:g}")
    if isinstance(rng, Rng):
        logger.debug("jitter: seed=%d magnitude=%g", rng.seed, magnitude)
        gen = rng.generator()
    else:
        logger.debug("jitter: caller generator, magnitude=%g", magnitude)
        gen = rng
    moved = xy + gen.uniform(-magnitude, magnitude, size=xy.shape)
    return [Point(float(x), float(y)) for x, y in moved]


def jitter_ordering(ord: Ordering, magnitude: float, rng: Rng | np.random.Generator) -> Ordering:
    """Same ranks and weights, perturbed locations"""
    return ord.with_locations(jitter([s.location for s in ord.sites], magnitude, rng))
