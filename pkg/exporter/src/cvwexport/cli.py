"""Command-line entry point.

  cvw-export --out model.cvw [--num-classes N] [--pretrained] [--seed S]
  cvw-export --out outdir --image road.png [--image ...]   # parity bundles
  cvw-export --out outdir --fixture-seed 0                 # tiny golden fixture
"""

import argparse
import os
import sys

from .export import export_vgg16, make_fixture, make_parity_bundle
from .writer import ExportError


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="cvw-export",
        description="Export torchvision VGG16 to a CVW container, optionally "
                    "with golden parity vectors for test images.")
    ap.add_argument("--out", required=True,
                    help="output .cvw path, or a directory when --image or "
                         "--fixture-seed is given")
    ap.add_argument("--num-classes", type=int, default=1000)
    ap.add_argument("--image", action="append", default=[],
                    help="write a parity bundle (container + golden JSON) "
                         "for this image; repeatable")
    ap.add_argument("--pretrained", action="store_true",
                    help="fetch ImageNet weights (falls back to seeded "
                         "random init if the download fails)")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for random-init weights")
    ap.add_argument("--fixture-seed", type=int, default=None,
                    help="instead of VGG16, emit a tiny seeded fixture net "
                         "with golden activations")
    args = ap.parse_args(argv)

    try:
        if args.fixture_seed is not None:
            os.makedirs(args.out, exist_ok=True)
            s = args.fixture_seed
            cvw = os.path.join(args.out, f"fixture_{s}.cvw")
            golden = os.path.join(args.out, f"fixture_{s}.golden.json")
            make_fixture(s, cvw, golden)
            print(f"wrote {cvw}\nwrote {golden}")
        elif args.image:
            os.makedirs(args.out, exist_ok=True)
            container = os.path.join(args.out, "vgg16.cvw")
            for image in args.image:
                stem = os.path.splitext(os.path.basename(image))[0]
                golden = os.path.join(args.out, f"{stem}.golden.json")
                make_parity_bundle(image, container, golden,
                                   args.num_classes, args.pretrained,
                                   args.seed)
                print(f"wrote {golden}")
            print(f"wrote {container}")
        else:
            export_vgg16(args.out, args.num_classes, args.pretrained,
                         args.seed)
            print(f"wrote {args.out}")
    except ExportError as exc:
        print(f"cvw-export: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cvw-export: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
