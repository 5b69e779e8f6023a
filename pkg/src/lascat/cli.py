"""Command-line front end: ``lascat {forward,locate,invert,verify}``.

Exit codes are 0 on success, 1 on a runtime failure and 2 on invalid
usage or input.
"""

import argparse
import csv
import dataclasses
import json
import logging
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .checks import run_checks
from .dataset import (
    STANDARD_APERTURES,
    FarFieldFormatError,
    add_noise,
    farfield_to_dict,
    read_farfield,
    standard_aperture,
)
from .esm import EsmLocator
from .forward import ForwardConfig, far_field_at
from .geometry import REFERENCE_CURVES, PriorKind, reference_curve
from .mcmc import AcceptanceMode, BayesianShapeReconstructor, Kernel

__all__ = ["RunConfig", "main", "build_parser"]

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Every setting of a run; serialized as flat JSON and echoed into outputs."""

    # obstacle and data
    curve: str = "kite"
    radius: float = 1.0
    shift: tuple = (0.0, 0.0)
    k: float = 1.0
    coupling: float | None = None
    n_quad_forward: int = 64
    aperture_obs: str = "G1O"
    aperture_inc: str = "G1I"
    n_obs: int | None = None
    noise: float = 0.0
    seed: int | None = 0
    # localization
    probe_radius: float = 2.0
    extent: tuple = (-3.0, 3.0, -3.0, 3.0)
    spacing: float = 0.1
    alpha_rel: float = 1e-2
    n_directions: int = 64
    # inversion
    location: tuple | None = None
    prior: str = "qb"
    n_terms: int = 10
    beta: float = 1e-4
    n_iter: int = 10_000
    kernel: str = "f1"
    acceptance: str = "pcn"
    cm_window: int = 1000
    noise_level: float = 0.1
    sigma: float | None = None
    r_max: float = 10.0
    n_quad_inverse: int = 32

    def __post_init__(self):
        if self.curve.lower() not in REFERENCE_CURVES:
            raise ValueError(f"unknown curve {self.curve!r}; valid curves: {', '.join(REFERENCE_CURVES)}")
        for name in (self.aperture_obs, self.aperture_inc):
            if name.upper() not in STANDARD_APERTURES:
                raise ValueError(f"unknown aperture {name!r}; valid: {', '.join(STANDARD_APERTURES)}")
        if not self.k > 0:
            raise ValueError("k must be positive")
        if self.noise < 0:
            raise ValueError("noise must be nonnegative")
        if len(self.shift) != 2 or len(self.extent) != 4:
            raise ValueError("shift needs 2 numbers and extent needs 4")
        if self.location is not None and len(self.location) != 2:
            raise ValueError("location needs 2 numbers")
        PriorKind(self.prior)
        Kernel(self.kernel)
        AcceptanceMode(self.acceptance)
        for name in ("shift", "extent", "location"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(float(t) for t in v))

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ValueError("configuration must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValueError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**doc)

    def to_dict(self):
        d = dataclasses.asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    def replace(self, **overrides):
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})


def _load_config(args, **overrides):
    base = {}
    if args.config is not None:
        try:
            base = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: invalid JSON at line {exc.lineno}, column {exc.colno}") from None
    try:
        return RunConfig.from_dict(base).replace(**overrides)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _out_dir(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _read_data(path):
    try:
        return read_farfield(path)
    except OSError as exc:
        raise UsageError(f"cannot read far-field file: {exc}") from None
    except FarFieldFormatError as exc:
        raise UsageError(str(exc)) from None


def cmd_forward(args):
    cfg = _load_config(
        args,
        curve=args.curve,
        radius=args.radius,
        shift=args.shift,
        k=args.k,
        n_quad_forward=args.n_quad,
        aperture_obs=args.aperture_obs,
        aperture_inc=args.aperture_inc,
        n_obs=args.n_obs,
        noise=args.noise,
        seed=args.seed,
    )
    curve = reference_curve(cfg.curve, cfg.radius, cfg.shift)
    # the pre-validated names cannot fail here
    obs = standard_aperture(cfg.aperture_obs, cfg.n_obs)
    inc = standard_aperture(cfg.aperture_inc)
    fwd = ForwardConfig(k=cfg.k, coupling=cfg.coupling, n_quad=cfg.n_quad_forward)
    data = far_field_at(curve, fwd, (obs, inc))
    data = dataclasses.replace(data, provenance=f"lascat {__version__} forward; config={json.dumps(cfg.to_dict())}")
    data = add_noise(data, cfg.noise, cfg.seed)
    out = _out_dir(args.out)
    with open(out / "farfield.json", "w") as fh:
        json.dump(farfield_to_dict(data), fh, indent=1)
        fh.write("\n")
    _write_json(out / "run_config.json", cfg.to_dict())
    print(f"wrote {out / 'farfield.json'}: {data.shape[0]} x {data.shape[1]} far-field samples")
    return EXIT_OK


def cmd_locate(args):
    cfg = _load_config(
        args,
        probe_radius=args.probe_radius,
        alpha_rel=args.alpha_rel,
        spacing=args.spacing,
        extent=args.extent,
    )
    data = _read_data(args.farfield)
    loc = EsmLocator(cfg.probe_radius, cfg.extent, cfg.spacing, cfg.alpha_rel, cfg.n_directions)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            loc.fit(data)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = _out_dir(args.out)
    loc.indicator_map_.to_csv(out / "indicator.csv")
    summary = loc.indicator_map_.summary(location=loc.location_.tolist(), config=cfg.to_dict())
    if loc.on_boundary_:
        summary["warning"] = "indicator minimum on the grid boundary; the grid may not cover the obstacle"
        print("warning: " + summary["warning"], file=sys.stderr)
    _write_json(out / "location.json", summary)
    print(f"location: ({loc.location_[0]:.2f}, {loc.location_[1]:.2f})")
    return EXIT_OK


def _location(args, cfg):
    if args.location is not None and args.location_file is not None:
        raise UsageError("give either --location or --location-file, not both")
    if args.location_file is not None:
        try:
            doc = json.loads(Path(args.location_file).read_text())
            return tuple(float(v) for v in doc["location"])
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"cannot read location from {args.location_file}: {exc}") from None
    if args.location is not None:
        return tuple(args.location)
    return cfg.location


def cmd_invert(args):
    cfg = _load_config(
        args,
        prior=args.prior,
        kernel=args.kernel,
        acceptance=args.acceptance,
        beta=args.beta,
        sigma=args.sigma,
        n_iter=args.n_iter,
        cm_window=args.cm_window,
        n_quad_inverse=args.n_quad,
        seed=args.seed,
    )
    cfg = cfg.replace(location=_location(args, cfg))
    if cfg.location is None:
        raise UsageError("invert needs a location: --location X Y, --location-file, or 'location' in --config")
    data = _read_data(args.farfield)
    out = _out_dir(args.out)
    if PriorKind(cfg.prior) is PriorKind.QC:
        print("warning: prior 'qc' lacks the boundary regularity required by the stability theory", file=sys.stderr)
    est = BayesianShapeReconstructor(
        prior=cfg.prior,
        n_terms=cfg.n_terms,
        beta=cfg.beta,
        n_iter=cfg.n_iter,
        kernel=cfg.kernel,
        acceptance=cfg.acceptance,
        cm_window=cfg.cm_window,
        noise_level=cfg.noise_level,
        sigma=cfg.sigma,
        r_max=cfg.r_max,
        n_quad=cfg.n_quad_inverse,
        coupling=cfg.coupling,
        location=cfg.location,
        random_state=cfg.seed,
        trace_path=out / "trace.csv",
    )
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            est.fit(data)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    theta, x, y = est.boundary(256)
    with open(out / "boundary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "x", "y"])
        for row in zip(theta, x, y):
            w.writerow([repr(float(v)) for v in row])
    summary = {
        "acceptance_rate": est.acceptance_rate_,
        "n_accepted": est.result_.n_accepted,
        "cm_coeffs": est.coefficients_.tolist(),
        "z0": est.location_.tolist(),
        "sigma": est.sigma_,
        "config": cfg.to_dict(),
    }
    _write_json(out / "summary.json", summary)
    print(f"acceptance rate {est.acceptance_rate_:.4f}; wrote {out}")
    return EXIT_OK


def cmd_verify(args):
    results = run_checks()
    for r in results:
        line = r.line()
        if r.details.get("ratios"):
            line += "  ratios=" + ", ".join(f"{q:.3g}" for q in r.details["ratios"])
        print(line)
    if args.out is not None:
        out = _out_dir(args.out)
        _write_json(out / "verify.json", {"checks": [r.to_dict() for r in results]})
    return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME


def build_parser():
    p = argparse.ArgumentParser(prog="lascat", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True):
        sp.add_argument("--config", help="JSON run configuration; flags override its fields")
        sp.add_argument("--out", required=out_required, help="output directory")

    f = sub.add_parser("forward", help="synthesize far-field data for a reference obstacle")
    common(f)
    f.add_argument("--curve", choices=REFERENCE_CURVES)
    f.add_argument("--radius", type=float, help="circle radius")
    f.add_argument("--shift", type=float, nargs=2, metavar=("X", "Y"))
    f.add_argument("--k", type=float)
    f.add_argument("--n-quad", type=int, help="half node count of the synthesis solver (default 64)")
    f.add_argument("--aperture-obs", choices=[n for n in STANDARD_APERTURES if n.endswith("O")])
    f.add_argument("--aperture-inc", choices=[n for n in STANDARD_APERTURES if n.endswith("I")])
    f.add_argument("--n-obs", type=int, help="number of observation directions")
    f.add_argument("--noise", type=float, help="relative noise level, e.g. 0.1")
    f.add_argument("--seed", type=int)
    f.set_defaults(func=cmd_forward)

    lo = sub.add_parser("locate", help="estimate the obstacle location by the extended sampling method")
    common(lo)
    lo.add_argument("farfield")
    lo.add_argument("--probe-radius", type=float)
    lo.add_argument("--alpha-rel", type=float)
    lo.add_argument("--spacing", type=float)
    lo.add_argument("--extent", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    lo.set_defaults(func=cmd_locate)

    inv = sub.add_parser("invert", help="sample the boundary posterior and report its conditional mean")
    common(inv)
    inv.add_argument("farfield")
    inv.add_argument("--location", type=float, nargs=2, metavar=("X", "Y"))
    inv.add_argument("--location-file", help="location.json written by 'locate'")
    inv.add_argument("--prior", choices=[k.value for k in PriorKind])
    inv.add_argument("--kernel", choices=[k.value for k in Kernel])
    inv.add_argument("--acceptance", choices=[m.value for m in AcceptanceMode])
    inv.add_argument("--beta", type=float)
    inv.add_argument("--sigma", type=float, help="absolute noise scale")
    inv.add_argument("--n-iter", type=int)
    inv.add_argument("--cm-window", type=int)
    inv.add_argument("--n-quad", type=int, help="half node count of the inversion solver (default 32)")
    inv.add_argument("--seed", type=int)
    inv.set_defaults(func=cmd_invert)

    v = sub.add_parser("verify", help="run the numerical self-checks")
    v.add_argument("--out", help="also write verify.json here")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lascat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"lascat {args.command}: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
