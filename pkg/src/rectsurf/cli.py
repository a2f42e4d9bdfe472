"""Command-line surface over the library operations.

Results are printed as documents of the input formats (surfaces), exact
rational strings (scalars), or machine-readable JSON reports.  Exit codes:
0 success (absence of an immersion is an answer, not an error), 1 domain
errors, 2 malformed input.
"""
from __future__ import annotations

import argparse
import itertools
import sys
from fractions import Fraction

from . import disks as disks_mod
from . import lattice, morphism, surface as surface_mod, transform
from .geom import NegativeWinding, PointOnCurve, RatPoint
from .morphism import ImmersionMap, InvalidProbe, InvalidSubUnion, NoImmersion
from .serialize import (
    DocumentError,
    doc_to_loop,
    doc_to_surface,
    dumps,
    load_file,
    loop_to_doc,
    parse_point,
    parse_rat,
    rat_str,
    surface_to_doc,
)
from .surface import (
    FACE,
    InconsistentEncoding,
    InvalidPoint,
    InvalidSurface,
    NotNormalized,
    Surface,
)

_DOMAIN_ERRORS = (
    InvalidSurface,
    InvalidPoint,
    NotNormalized,
    InconsistentEncoding,
    InvalidSubUnion,
    InvalidProbe,
    PointOnCurve,
    NegativeWinding,
    lattice.NotAChain,
    disks_mod.NotContainedInS,
    transform.KTouchesBoundary,
    transform.RadiusTooLarge,
    transform.PreconditionViolated,
    ValueError,
)


def _surface(path: str) -> Surface:
    return doc_to_surface(load_file(path))


def _point_on(s: Surface, text: str):
    p = parse_point(text)
    cpx = s.complex()
    for r in range(len(s.rects)):
        if s.rects[r].contains_point(p):
            try:
                return s.point(r, p.x, p.y)
            except InvalidPoint:
                continue
    raise InvalidPoint(f"({rat_str(p.x)},{rat_str(p.y)}) is not a point of the surface")


def _imm_report(res) -> dict:
    if isinstance(res, NoImmersion):
        return {
            "result": "none",
            "witness": {"at": res.at, "crossing": res.crossing, "reason": res.reason},
        }
    cell_map = sorted(
        [res.source_cpx.describe(a), res.target_cpx.describe(b)]
        for a, b in res.cell_map.items()
    )
    return {
        "result": "immersion",
        "embedding": res.injective,
        "cells": len(res.cell_map),
        "cell_map": cell_map,
    }


def _cert_report(cert) -> dict:
    return {
        "passed": cert.passed,
        "note": cert.note,
        "probes": [
            {
                "probe": it.probe,
                "immerses_from": it.immerses_from,
                "criterion_a": it.a_ok,
                "still_embeds_at_end": it.still_embeds_at_end,
                "immerses_limit": it.immerses_limit,
                "criterion_b": it.b_ok,
            }
            for it in cert.items
        ],
    }


def _probe_pool(spec: str, chain):
    if not spec:
        return [p for p in chain if not p.is_open and surface_mod.classify(p).is_disk]
    parts = spec.split(",")
    if len(parts) != 3:
        raise DocumentError("--probes takes max_rects,denom,count")
    n, d, count = (int(x) for x in parts)
    return list(itertools.islice(disks_mod.enumerate_subbasis(n, d), count))


def _render_svg(s: Surface, out_path: str) -> None:
    cpx = s.complex()
    counts: dict[tuple, int] = {}
    for c in range(cpx.n_classes):
        if cpx.kind[c] == FACE and cpx.admissible(c):
            counts[cpx.footprint(c)] = counts.get(cpx.footprint(c), 0) + 1
    xs = [r.x_lo for r in s.rects] + [r.x_hi for r in s.rects]
    ys = [r.y_lo for r in s.rects] + [r.y_hi for r in s.rects]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    w, h = float(x1 - x0), float(y1 - y0)
    pad = 0.05 * max(w, h, 1.0)
    scale = 512.0 / max(w, h, 1e-9)

    def X(v) -> float:
        return (float(v) - float(x0) + pad) * scale

    def Y(v) -> float:
        return (float(y1) - float(v) + pad) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{(w + 2 * pad) * scale:.1f}" '
        f'height="{(h + 2 * pad) * scale:.1f}">'
    ]
    for (fx0, fx1, fy0, fy1), n in sorted(counts.items()):
        opacity = min(0.15 * n, 0.9)
        parts.append(
            f'<rect x="{X(fx0):.2f}" y="{Y(fy1):.2f}" width="{(float(fx1)-float(fx0))*scale:.2f}" '
            f'height="{(float(fy1)-float(fy0))*scale:.2f}" fill="#4477aa" '
            f'fill-opacity="{opacity:.2f}" stroke="none"/>'
        )
    if not s.is_open:
        for loop in surface_mod.boundary_loops(s):
            pts = " ".join(f"{X(v.x):.2f},{Y(v.y):.2f}" for v in loop.vertices)
            parts.append(
                f'<polygon points="{pts}" fill="none" stroke="#222222" stroke-width="1.5"/>'
            )
    bx, by = s.base[1].x, s.base[1].y
    parts.append(f'<circle cx="{X(bx):.2f}" cy="{Y(by):.2f}" r="4" fill="#cc3311"/>')
    parts.append("</svg>")
    with open(out_path, "w") as f:
        f.write("\n".join(parts) + "\n")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rectsurf", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)
    sub.add_parser("validate").add_argument("file")
    p = sub.add_parser("dev")
    p.add_argument("file")
    p.add_argument("point")
    sub.add_parser("chi").add_argument("file")
    sub.add_parser("classify").add_argument("file")
    p = sub.add_parser("immersion")
    p.add_argument("fileA")
    p.add_argument("fileB")
    p = sub.add_parser("fuse")
    p.add_argument("files", nargs="+")
    p = sub.add_parser("core")
    p.add_argument("files", nargs="+")
    p = sub.add_parser("er")
    p.add_argument("file")
    p.add_argument("point")
    p = sub.add_parser("rebase")
    p.add_argument("file")
    p.add_argument("point")
    p = sub.add_parser("act")
    p.add_argument("file")
    p.add_argument("matrix", help="four rationals a b c d, space separated")
    sub.add_parser("disks").add_argument("loopfile")
    p = sub.add_parser("smallest-disk")
    p.add_argument("file")
    p.add_argument("subunion")
    sub.add_parser("images").add_argument("file")
    p = sub.add_parser("limit")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--direct", action="store_true")
    g.add_argument("--inverse", action="store_true")
    p.add_argument("files", nargs="+")
    p.add_argument("--probes", default="", help="probe pool max_rects,denom,count")
    p = sub.add_parser("enumerate")
    p.add_argument("--max-rects", type=int, required=True)
    p.add_argument("--denom", type=int, required=True)
    p.add_argument("--count", type=int, default=None)
    p = sub.add_parser("render")
    p.add_argument("file")
    p.add_argument("out")
    return ap


def _run(args) -> int:
    out = sys.stdout
    if args.cmd == "validate":
        rep = _surface(args.file).validate()
        print(dumps({"ok": rep.ok, "problems": list(rep.problems)}), file=out)
    elif args.cmd == "dev":
        s = _surface(args.file)
        s.require_valid()
        p = _point_on(s, args.point)
        print(dumps({"x": rat_str(p.pos.x), "y": rat_str(p.pos.y)}), file=out)
    elif args.cmd == "chi":
        print(surface_mod.euler_characteristic(_surface(args.file)), file=out)
    elif args.cmd == "classify":
        print(repr(surface_mod.classify(_surface(args.file))), file=out)
    elif args.cmd == "immersion":
        res = morphism.find_immersion(_surface(args.fileA), _surface(args.fileB))
        print(dumps(_imm_report(res)), file=out)
    elif args.cmd == "fuse":
        res = lattice.fuse([_surface(f) for f in args.files])
        print(dumps(surface_to_doc(res.surface)), file=out)
    elif args.cmd == "core":
        res = lattice.core([_surface(f) for f in args.files])
        if res is lattice.EMPTY:
            print(dumps({"result": "O"}), file=out)
        else:
            print(dumps(surface_to_doc(res)), file=out)
    elif args.cmd == "er":
        s = _surface(args.file)
        er = transform.embedding_radius(s, _point_on(s, args.point))
        print(str(er), file=out)
    elif args.cmd == "rebase":
        s = _surface(args.file)
        moved, _ = transform.rebase(s, _point_on(s, args.point))
        print(dumps(surface_to_doc(moved)), file=out)
    elif args.cmd == "act":
        vals = [parse_rat(v) for v in args.matrix.split()]
        if len(vals) != 4:
            raise DocumentError("matrix spec needs four rationals")
        h = transform.AxisAffine.from_matrix(*vals)
        print(dumps(surface_to_doc(transform.act(h, _surface(args.file)))), file=out)
    elif args.cmd == "disks":
        loop = doc_to_loop(load_file(args.loopfile))
        found = disks_mod.disks_bounded_by(loop)
        print(
            dumps({"count": len(found), "disks": [surface_to_doc(d) for d in found]}),
            file=out,
        )
    elif args.cmd == "smallest-disk":
        s = _surface(args.file)
        k = _surface(args.subunion)
        print(dumps(surface_to_doc(disks_mod.smallest_closed_disk(s, k))), file=out)
    elif args.cmd == "images":
        found = disks_mod.immersed_images(_surface(args.file))
        print(
            dumps({"count": len(found), "images": [surface_to_doc(d) for d in found]}),
            file=out,
        )
    elif args.cmd == "limit":
        chain = [_surface(f) for f in args.files]
        if args.direct:
            limit, cert = lattice.direct_limit(chain)
        else:
            limit, cert = lattice.inverse_limit(chain)
        if args.probes:
            probes = _probe_pool(args.probes, chain)
            target = limit if limit is not lattice.EMPTY else None
            if target is not None:
                probes = [p for p in probes if surface_mod.classify(p).is_disk]
                cert = morphism.convergence_certificate(chain, target, probes)
        doc = {
            "limit": "O" if limit is lattice.EMPTY else surface_to_doc(limit),
            "certificate": _cert_report(cert),
        }
        print(dumps(doc), file=out)
    elif args.cmd == "enumerate":
        stream = disks_mod.enumerate_subbasis(args.max_rects, args.denom)
        if args.count is not None:
            stream = itertools.islice(stream, args.count)
        for s in stream:
            print(dumps(surface_to_doc(s)), file=out)
    elif args.cmd == "render":
        s = _surface(args.file)
        s.require_valid()
        _render_svg(s, args.out)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except DocumentError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except _DOMAIN_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
