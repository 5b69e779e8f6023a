"""Apertures, far-field data containers, synthetic noise and the JSON file format."""

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "ApertureSpec",
    "FarFieldData",
    "FarFieldFormatError",
    "DIRECTIONS_PER_CIRCLE",
    "STANDARD_APERTURES",
    "standard_aperture",
    "add_noise",
    "read_farfield",
    "write_farfield",
    "farfield_to_dict",
    "farfield_from_dict",
]

DIRECTIONS_PER_CIRCLE = 64
TWO_PI = 2.0 * math.pi


class FarFieldFormatError(ValueError):
    """Malformed far-field file or inconsistent far-field data."""


@dataclass(frozen=True)
class ApertureSpec:
    """Union of closed angular arcs ``[lo, hi]`` carrying ``count`` directions.

    Directions are spread over the arcs in proportion to arc length, both
    endpoints included.  A full-circle arc drops its duplicate endpoint and a
    zero-length arc is a single direction.
    """

    arcs: tuple
    count: int

    def __post_init__(self):
        arcs = tuple((float(lo), float(hi)) for lo, hi in self.arcs)
        if not arcs:
            raise ValueError("aperture needs at least one arc")
        for lo, hi in arcs:
            if hi < lo or lo < 0 or hi > TWO_PI + 1e-12:
                raise ValueError(f"invalid arc [{lo}, {hi}]; arcs must lie in [0, 2 pi]")
        ordered = sorted(arcs)
        for (_, hi), (lo, _) in zip(ordered, ordered[1:]):
            if lo <= hi:
                raise ValueError("arcs must not overlap")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"count must be a positive integer, got {self.count}")
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "count", int(self.count))

    @property
    def length(self):
        return sum(hi - lo for lo, hi in self.arcs)

    def _allocation(self):
        lengths = np.array([hi - lo for lo, hi in self.arcs])
        if lengths.sum() == 0.0:
            if self.count != len(self.arcs):
                raise ValueError("point apertures need exactly one direction per point")
            return np.ones(len(self.arcs), dtype=int)
        raw = self.count * lengths / lengths.sum()
        counts = np.floor(raw).astype(int)
        # largest remainder so the counts sum exactly to ``count``
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[: self.count - counts.sum()]] += 1
        return counts

    def angles(self):
        out = []
        for (lo, hi), m in zip(self.arcs, self._allocation()):
            if m == 0:
                continue
            if hi - lo >= TWO_PI - 1e-12:
                out.append(lo + TWO_PI * np.arange(m) / m)
            elif m == 1:
                out.append(np.array([0.5 * (lo + hi)]))
            else:
                out.append(np.linspace(lo, hi, m))
        return np.concatenate(out)

    def directions(self):
        phi = self.angles()
        return np.array([np.cos(phi), np.sin(phi)])


def _arc_aperture(arcs):
    length = sum(hi - lo for lo, hi in arcs)
    return ApertureSpec(tuple(arcs), round(DIRECTIONS_PER_CIRCLE * length / TWO_PI))


_PI = math.pi
STANDARD_APERTURES = {
    "G1O": ((0.0, TWO_PI),),
    "G2O": ((0.0, _PI),),
    "G3O": ((0.0, _PI / 2),),
    "G4O": ((0.0, _PI / 2), (_PI, 3 * _PI / 2)),
    "G5O": ((0.0, _PI / 4), (_PI, 5 * _PI / 4)),
    "G1I": ((0.0, 0.0),),
    "G2I": tuple((a, a) for a in (0.0, _PI / 8, _PI / 4, 3 * _PI / 8, _PI / 2)),
}


def standard_aperture(name, count=None):
    """The named observation (G1O..G5O) or incidence (G1I, G2I) aperture."""
    key = name.upper()
    if key not in STANDARD_APERTURES:
        raise ValueError(f"unknown aperture {name!r}; valid: {', '.join(STANDARD_APERTURES)}")
    arcs = STANDARD_APERTURES[key]
    if all(lo == hi for lo, hi in arcs):
        return ApertureSpec(arcs, len(arcs))
    if count is not None:
        return ApertureSpec(arcs, count)
    return _arc_aperture(arcs)


@dataclass(frozen=True, eq=False)
class FarFieldData:
    """Far-field samples ``values[i, j] = u_inf(obs_i, inc_j)``."""

    k: float
    obs_angles: np.ndarray
    inc_angles: np.ndarray
    values: np.ndarray
    noise_sigma: float = 0.0
    provenance: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        obs = np.atleast_1d(np.asarray(self.obs_angles, dtype=float))
        inc = np.atleast_1d(np.asarray(self.inc_angles, dtype=float))
        values = np.asarray(self.values, dtype=complex)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if not (np.isfinite(self.k) and self.k > 0):
            raise FarFieldFormatError(f"field 'k' must be a positive number, got {self.k!r}")
        if values.shape != (obs.size, inc.size):
            raise FarFieldFormatError(
                f"dimension mismatch: values has shape {values.shape}, "
                f"expected ({obs.size}, {inc.size}) from obs_angles x inc_angles"
            )
        if not np.all(np.isfinite(values)):
            raise FarFieldFormatError("field 'values' contains non-finite entries")
        if self.noise_sigma < 0:
            raise FarFieldFormatError("field 'noise_sigma' must be nonnegative")
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "obs_angles", obs)
        object.__setattr__(self, "inc_angles", inc)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "noise_sigma", float(self.noise_sigma))

    @property
    def shape(self):
        return self.values.shape

    def obs_directions(self):
        return np.array([np.cos(self.obs_angles), np.sin(self.obs_angles)])

    def inc_directions(self):
        return np.array([np.cos(self.inc_angles), np.sin(self.inc_angles)])

    def __eq__(self, other):
        if not isinstance(other, FarFieldData):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.obs_angles, other.obs_angles)
            and np.array_equal(self.inc_angles, other.inc_angles)
            and np.array_equal(self.values, other.values)
            and self.noise_sigma == other.noise_sigma
            and self.provenance == other.provenance
        )


def add_noise(data, relative_level, seed=None):
    """Add complex Gaussian noise with ``sigma = relative_level * max|values|``.

    Real and imaginary parts are independent ``N(0, sigma^2 / 2)`` so that
    ``E|noise|^2 = sigma^2``.
    """
    if relative_level < 0:
        raise ValueError("noise level must be nonnegative")
    if relative_level == 0:
        return data
    if data.noise_sigma > 0:
        raise ValueError("data already carries noise; refusing to add noise twice")
    rng = np.random.default_rng(seed)
    sigma = float(relative_level * np.max(np.abs(data.values)))
    noise = rng.standard_normal(data.shape) + 1j * rng.standard_normal(data.shape)
    noisy = data.values + sigma / math.sqrt(2.0) * noise
    prov = f"{data.provenance}; noise level={relative_level} seed={seed}".lstrip("; ")
    return replace(data, values=noisy, noise_sigma=sigma, provenance=prov)


_REQUIRED = ("k", "obs_angles", "inc_angles", "values")


def farfield_to_dict(data):
    return {
        "k": data.k,
        "obs_angles": data.obs_angles.tolist(),
        "inc_angles": data.inc_angles.tolist(),
        "values": [[[v.real, v.imag] for v in row] for row in data.values.tolist()],
        "noise_sigma": data.noise_sigma,
        "provenance": data.provenance,
    }


def farfield_from_dict(doc):
    if not isinstance(doc, dict):
        raise FarFieldFormatError("far-field document must be a JSON object")
    for key in _REQUIRED:
        if key not in doc:
            raise FarFieldFormatError(f"missing required field {key!r}")
    unknown = set(doc) - set(_REQUIRED) - {"noise_sigma", "provenance"}
    if unknown:
        raise FarFieldFormatError(f"unknown fields: {', '.join(sorted(unknown))}")
    try:
        k = float(doc["k"])
    except (TypeError, ValueError):
        raise FarFieldFormatError(f"field 'k' must be a number, got {doc['k']!r}") from None
    rows = doc["values"]
    if not isinstance(rows, list):
        raise FarFieldFormatError("field 'values' must be a list of rows")
    n_obs = len(doc["obs_angles"])
    if len(rows) != n_obs:
        raise FarFieldFormatError(
            f"dimension mismatch: 'values' has {len(rows)} rows but 'obs_angles' has {n_obs} entries"
        )
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise FarFieldFormatError("field 'values' must be rows of [re, im] pairs of equal length") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        if arr.size == 0 and n_obs == 0:
            raise FarFieldFormatError("field 'obs_angles' must not be empty")
        raise FarFieldFormatError("field 'values' must be rows of [re, im] pairs")
    values = arr[..., 0] + 1j * arr[..., 1]
    return FarFieldData(
        k=k,
        obs_angles=np.asarray(doc["obs_angles"], dtype=float),
        inc_angles=np.asarray(doc["inc_angles"], dtype=float),
        values=values,
        noise_sigma=float(doc.get("noise_sigma", 0.0)),
        provenance=str(doc.get("provenance", "")),
    )


def write_farfield(data, path):
    with open(path, "w") as fh:
        json.dump(farfield_to_dict(data), fh, indent=1)
        fh.write("\n")


def read_farfield(path):
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FarFieldFormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return farfield_from_dict(doc)
    except FarFieldFormatError as exc:
        raise FarFieldFormatError(f"{path}: {exc}") from None
