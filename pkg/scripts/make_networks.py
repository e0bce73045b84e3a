#!/usr/bin/env python3
"""Write the bundled ground-truth networks as BIF files under networks/."""
import argparse
from pathlib import Path

from climb.bif import serialize_bif
from climb.netgen import alarm_network, blanket_demo_network


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="networks", type=Path)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for net in (alarm_network(), blanket_demo_network()):
        path = args.out_dir / f"{net.name}.bif"
        path.write_text(serialize_bif(net))
        edges = sum(len(p) for p in net.parents.values())
        print(f"wrote {path} ({len(net.nodes)} nodes, {edges} edges)")


if __name__ == "__main__":
    main()
