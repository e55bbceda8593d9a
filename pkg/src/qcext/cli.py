"""Command-line front end: bodies, extensions, certificates, classification,
verification and plots."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import config as cfg
from . import counterexamples as cx
from . import extension as ext
from . import plots
from . import serialize as ser
from . import verify as vf
from .geometry import Body2, GeometryError, recession_cone, find_asymptotic_direction, is_rotund
from .levelset import LevelFamily, LevelSetError

GALLERY = {
    "disk": lambda p: Body2.ball(p.get("center", (0.0, 0.0)), p.get("radius", 1.0)),
    "ball": lambda p: Body2.ball(p.get("center", (0.0, 0.0)), p.get("radius", 1.0)),
    "square": lambda p: Body2.from_polychain(
        [(-1, -1), (1, -1), (1, 1), (-1, 1)]),
    "rectangle": lambda p: Body2.from_polychain(
        [(0, -1), (1, -1), (1, 1), (0, 1)]),
    "triangle": lambda p: Body2.from_polychain([(0, 1), (2, 1), (1, -3)]),
    "parabola": lambda p: Body2.epigraph("parabola", p or None),
    "exp_hypograph": lambda p: Body2.epigraph("exp_hypograph"),
    "hypograph": lambda p: Body2.epigraph("exp_hypograph"),
    "cosh": lambda p: Body2.epigraph("cosh", p or None),
    "halfplane": lambda p: Body2.from_halfplanes([((0.0, 1.0), 1.0)]),
}

CERTIFY_KINDS = {
    "no-qc": lambda body, k: cx.gen_no_qc(body, k_max=k),
    "non-rotund": lambda body, k: cx.gen_non_rotund(body, k_max=k),
    "no-uc": lambda body, k: cx.gen_no_uc(body, k_max=k),
    "no-lip": lambda body, k: cx.gen_no_lip(body, k_max=k),
    "usc": lambda body, k: cx.gen_usc_counterexample(),
}


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _emit(text: str, out: str = ""):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        print(text)


def _load_body(path: str) -> Body2:
    return ser.body_from_json(_read_json(path))


def _parse_window(text, default=(-8.0, 8.0, -8.0, 8.0)):
    if not text:
        return default
    parts = [float(x) for x in str(text).split(",")]
    if len(parts) != 4:
        raise ValueError("window must be xmin,xmax,ymin,ymax")
    return tuple(parts)


def _body_info(body: Body2) -> dict:
    cone = recession_cone(body)
    asym = find_asymptotic_direction(body)
    return {
        "bounded": body.bounded,
        "rotund": is_rotund(body),
        "recession_cone": {"kind": cone.kind,
                           "directions": [np.asarray(d).tolist()
                                          for d in cone.directions()]},
        "asymptotic_direction": None if asym is None else
        {"direction": np.asarray(asym[0]).tolist(),
         "witness": np.asarray(asym[1]).tolist()},
        "witness": body.witness.tolist(),
        "clearance": body.clearance,
    }


def cmd_body(args, conf) -> int:
    if args.action == "make":
        if args.name not in GALLERY:
            print(f"unknown body name {args.name!r}; "
                  f"choose from {sorted(GALLERY)}", file=sys.stderr)
            return 2
        params = json.loads(args.params) if args.params else {}
        body = GALLERY[args.name](params)
        _emit(json.dumps(ser.body_to_json(body), indent=2), conf.out)
        return 0
    data = _read_json(args.file)
    try:
        body = ser.body_from_json(data)
    except (GeometryError, KeyError, ValueError) as e:
        print(f"invalid body: {e}", file=sys.stderr)
        return 2
    if args.action == "validate":
        _emit(json.dumps(ser.body_to_json(body), indent=2), conf.out)
        return 0
    info = {"body": ser.body_to_json(body)}
    info.update(_body_info(body))
    _emit(json.dumps(info, indent=2), conf.out)
    return 0


def cmd_extend(args, conf) -> int:
    body = _load_body(args.body)
    fdata = _read_json(args.function)
    if fdata.get("kind") != "staircase":
        print("extension needs a staircase family function", file=sys.stderr)
        return 2
    try:
        fam = LevelFamily(levels=np.asarray(fdata["levels"], dtype=float),
                          bodies=[ser.body_from_json(b) for b in fdata["bodies"]],
                          ambient=body)
        res = ext.extend_function(fam, resolution=conf.resolution,
                                  tol=max(conf.tol, 1e-9))
    except (LevelSetError, ext.ExtensionError, GeometryError) as e:
        print(f"extension failed: {e}", file=sys.stderr)
        return 2
    window = _parse_window(args.window_box)
    meta = {"family": ser.family_hash(fam), "regularity": res.regularity}
    csv = ser.grid_csv(res, window, conf.grid, meta)
    _emit(csv, conf.out or "extension.csv")
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(plots.svg_extension(res, window))
    return 0


def cmd_certify(args, conf) -> int:
    if args.kind == "usc":
        body = None
    else:
        body = _load_body(args.body)
    try:
        _, cert = CERTIFY_KINDS[args.kind](body, conf.kmax)
    except (cx.ConstructionError, GeometryError) as e:
        print(f"hypothesis check failed: {e}", file=sys.stderr)
        return 2
    prefix = conf.out or f"certificate_{args.kind.replace('-', '_')}"
    with open(f"{prefix}.json", "w") as fh:
        json.dump(ser.certificate_to_json(cert), fh, indent=2)
    written = [f"{prefix}.json"]
    for name, (header, rows) in ser.certificate_tables(cert).items():
        path = f"{prefix}_{name}.csv"
        ser.write_csv(path, header, rows, {"kind": args.kind})
        written.append(path)
    if args.svg:
        try:
            with open(args.svg, "w") as fh:
                fh.write(plots.svg_certificate(cert))
            written.append(args.svg)
        except ValueError:
            pass
    print("\n".join(written))
    return 0


def cmd_characterize(args, conf) -> int:
    body = _load_body(args.body)
    cls = cx.characterize(body)
    print(cls.extendability_class)
    payload = {"class": cls.extendability_class, "predicates": cls.predicates,
               "denied": cls.denied, "granted": cls.granted,
               "evidence": cls.evidence}
    _emit(json.dumps(payload, indent=2), conf.out)
    return 0


def cmd_verify(args, conf) -> int:
    try:
        report = vf.run_suite(args.suite, seed=conf.seed, budget=args.budget,
                              plant_failure=args.plant_failure)
    except vf.VerifyError as e:
        print(str(e), file=sys.stderr)
        return 2
    print(report.summary())
    if conf.out:
        with open(conf.out, "w") as fh:
            json.dump(report.to_json(), fh, indent=2)
    return 0 if report.passed else 1


def cmd_plot(args, conf) -> int:
    window = _parse_window(args.window_box)
    if args.certificate:
        cert = ser.certificate_from_json(_read_json(args.certificate))
        try:
            svg = plots.svg_certificate(cert)
        except ValueError as e:
            print(str(e), file=sys.stderr)
            return 2
        _emit(svg, conf.out or "plot.svg")
        return 0
    body = _load_body(args.body)
    if args.function:
        fdata = _read_json(args.function)
        fam = LevelFamily(levels=np.asarray(fdata["levels"], dtype=float),
                          bodies=[ser.body_from_json(b) for b in fdata["bodies"]],
                          ambient=body)
        res = ext.extend_function(fam, resolution=conf.resolution)
        svg = plots.svg_extension(res, window)
    else:
        svg = plots.svg_body(body, window)
    _emit(svg, conf.out or "plot.svg")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--resolution", type=int, default=None)
    common.add_argument("--window", dest="window", type=float, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--kmax", type=int, default=None)
    common.add_argument("--grid", type=int, default=None)
    common.add_argument("--out", default="")

    p = argparse.ArgumentParser(prog="qcext",
                                description="planar quasiconvex extension toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    pb = sub.add_parser("body", parents=[common], help="make/validate/inspect bodies")
    pb.add_argument("action", choices=["make", "validate", "info"])
    pb.add_argument("name_or_file", nargs="?", default="")
    pb.add_argument("--params", default="")
    pb.set_defaults(fn=cmd_body)

    pe = sub.add_parser("extend", parents=[common], help="extend a level family")
    pe.add_argument("--body", required=True)
    pe.add_argument("--function", required=True)
    pe.add_argument("--window-box", default="")
    pe.add_argument("--svg", default="")
    pe.set_defaults(fn=cmd_extend)

    pc = sub.add_parser("certify", parents=[common],
                        help="emit a non-extendability certificate")
    pc.add_argument("--kind", required=True, choices=sorted(CERTIFY_KINDS))
    pc.add_argument("--body", default="")
    pc.add_argument("--svg", default="")
    pc.set_defaults(fn=cmd_certify)

    pch = sub.add_parser("characterize", parents=[common],
                         help="classify a body's extendability")
    pch.add_argument("--body", required=True)
    pch.set_defaults(fn=cmd_characterize)

    pv = sub.add_parser("verify", parents=[common], help="run a property suite")
    pv.add_argument("--suite", default="geometry", choices=vf.SUITES)
    pv.add_argument("--budget", default="default", choices=["default", "small"])
    pv.add_argument("--plant-failure", action="store_true")
    pv.set_defaults(fn=cmd_verify)

    pp = sub.add_parser("plot", parents=[common], help="emit an SVG figure")
    pp.add_argument("--body", default="")
    pp.add_argument("--function", default="")
    pp.add_argument("--certificate", default="")
    pp.add_argument("--window-box", default="")
    pp.set_defaults(fn=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    conf = cfg.from_flags(args)
    # body takes its file from the positional argument
    if args.command == "body":
        if args.action == "make":
            args.name = args.name_or_file
        else:
            args.file = args.name_or_file
    try:
        return args.fn(args, conf)
    except FileNotFoundError as e:
        print(str(e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
