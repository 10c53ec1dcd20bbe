"""Command line entry point.

Exit codes: 0 success, 2 bad flags or paths, 3 the inputs parsed but no
embeddings could be produced.
"""

from __future__ import annotations

import argparse
import sys

from emb_exporter.export import VARIANTS, ExportError, ExportJob, export_embeddings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emb-export",
        description="Export image embeddings to an EMB1 file.",
    )
    parser.add_argument("--images", required=True, help="directory of input images")
    parser.add_argument("--variant", required=True, choices=VARIANTS)
    parser.add_argument("--out", required=True, help="output .emb path")
    parser.add_argument("--batch", type=int, default=32, help="inference batch size")
    parser.add_argument("--masks", default=None, help="mask directory (SegSV variant)")
    parser.add_argument("--weights", default=None, help="encoder state-dict file")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--seed", type=int, default=0, help="init seed without weights")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = ExportJob(
            image_dir=args.images,
            variant=args.variant,
            out_path=args.out,
            batch_size=args.batch,
            device=args.device,
            weights_path=args.weights,
            masks_dir=args.masks,
            init_seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not job.image_dir.is_dir():
        print(f"error: image directory {job.image_dir} does not exist", file=sys.stderr)
        return 2
    if job.masks_dir is not None and not job.masks_dir.is_dir():
        print(f"error: mask directory {job.masks_dir} does not exist", file=sys.stderr)
        return 2
    if job.weights_path is not None and not job.weights_path.is_file():
        print(f"error: weights file {job.weights_path} does not exist", file=sys.stderr)
        return 2
    try:
        result = export_embeddings(job)
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    suffix = f", {result.warning_count} skipped" if result.skipped else ""
    print(
        f"export: {len(result.ids)} rows -> {result.out_path} "
        f"(dim {result.dim}{suffix})"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
