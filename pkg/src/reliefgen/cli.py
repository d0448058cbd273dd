"""Command-line front door: gen, target, info, serve.

Exit codes: 0 success, 1 usage, 2 I/O, 3 pipeline failure (the message
carries the stable error code).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .basesurface import parse_base
from .cloud import load_cloud_path, save_mesh
from .compression import ReliefParams
from .errors import IOFailure, ReliefError
from .session import SessionConfig, prepare_session
from .target import TargetRequest, solve_for_height


def _add_common(p):
    p.add_argument("-i", "--input", required=True, help="input cloud (.ply/.xyz)")
    p.add_argument("--view", default="0,0,1",
                   help="view direction vx,vy,vz (default 0,0,1)")
    p.add_argument("--alpha", type=float, default=4.0)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--gamma", type=float, default=0.02)
    p.add_argument("--controls", type=int, default=8000,
                   help="target control-point count")
    p.add_argument("--levels", type=int, default=8,
                   help="B-spline hierarchy levels")
    p.add_argument("--base", default="plane",
                   help="plane[:z0] | fold:x0,s1,s2 | wave:amp,freq[,axis]")
    p.add_argument("--reference-mode", action="store_true",
                   help="disable pipelining (deterministic stage order)")
    p.add_argument("--timings", action="store_true",
                   help="print per-stage timings as JSON")


def _add_output(p):
    p.add_argument("-o", "--output", required=True, help="output mesh path")
    p.add_argument("--format", choices=("ply", "obj"), default=None,
                   help="output format (default: from extension)")


def build_parser():
    ap = argparse.ArgumentParser(prog="reliefgen",
                                 description="bas-relief generation from "
                                             "point clouds")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a relief mesh")
    _add_common(gen)
    _add_output(gen)

    tgt = sub.add_parser("target", help="generate at a requested height")
    _add_common(tgt)
    _add_output(tgt)
    g = tgt.add_mutually_exclusive_group(required=True)
    g.add_argument("--height", type=float, help="absolute target span")
    g.add_argument("--height-frac", type=float,
                   help="target span as a fraction of the bbox diagonal")
    tgt.add_argument("--max-solves", type=int, default=200)

    info = sub.add_parser("info", help="print session statistics as JSON")
    _add_common(info)

    srv = sub.add_parser("serve", help="start the HTTP/WebSocket service")
    srv.add_argument("--port", type=int, default=None)
    srv.add_argument("--host", default="127.0.0.1")
    return ap


def _session_from_args(args):
    cloud = load_cloud_path(args.input)
    view = tuple(float(v) for v in args.view.split(","))
    params = ReliefParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma,
                          base=parse_base(args.base))
    config = SessionConfig(target_controls=args.controls,
                           mbs_levels=args.levels,
                           reference_mode=args.reference_mode,
                           initial_params=params)
    return prepare_session(cloud, view, config)


def _write_mesh(session, args):
    mesh = session.export_mesh()
    fmt = args.format or ("obj" if args.output.endswith(".obj") else "ply")
    try:
        with open(args.output, "wb") as f:
            save_mesh(mesh, f, fmt)
    except OSError as e:
        raise IOFailure(str(e)) from None
    return mesh


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1

    try:
        if args.command == "serve":
            from .service import serve
            serve(port=args.port, host=args.host)
            return 0

        session = _session_from_args(args)

        if args.command == "info":
            frame = session.latest_frame()
            out = {
                "points": len(session.cloud.points),
                "visible": session.point_count,
                "controls": len(session.controls),
                "rho": session.rho,
                "diagonal": session.cloud.diagonal,
                "span": frame.span,
                "prepare_timings_ms": session.prepare_timings,
            }
            print(json.dumps(out, indent=2))
            return 0

        if args.command == "target":
            h0 = args.height if args.height is not None else \
                args.height_frac * session.cloud.diagonal
            res = solve_for_height(session, TargetRequest(h0, args.max_solves))
            session.adjust(replace(session.params,
                                   alpha=res.alpha, beta=res.beta))
            _write_mesh(session, args)
            print(json.dumps({"alpha": res.alpha, "beta": res.beta,
                              "span": res.span, "solves": res.solves,
                              "output": args.output}))
        else:  # gen
            _write_mesh(session, args)
            frame = session.latest_frame()
            print(json.dumps({"span": frame.span, "output": args.output}))

        if args.timings:
            print(json.dumps({
                "prepare_ms": session.prepare_timings,
                "frame_ms": session.latest_frame().timings,
            }, indent=2))
        return 0

    except IOFailure as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error [IOFailure]: {e}", file=sys.stderr)
        return 2
    except ReliefError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
