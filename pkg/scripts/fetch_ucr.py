"""Rebuild the vendored UCR test data under tests/data/.

Coffee and BeetleFly come from the ``ucr-datasets`` wheel (UCR 2018 tsv
files). ItalyPowerDemand is converted from the ``.ts`` file shipped in the
``aeon`` wheel. Both wheels are fetched with ``pip download``; nothing is
installed.

    python scripts/fetch_ucr.py [--dest tests/data]
"""

import argparse
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

WHEELS = {"ucr-datasets": "0.0.6", "aeon": "1.3.0"}


def download(tmp: Path) -> dict:
    paths = {}
    for name, version in WHEELS.items():
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", str(tmp), f"{name}=={version}"],
            check=True,
        )
        stem = name.replace("-", "_")
        paths[name] = next(tmp.glob(f"{stem}-{version}-*.whl"))
    return paths


def ts_to_tsv(text: str) -> str:
    lines = text.splitlines()
    start = next(i for i, line in enumerate(lines) if line.strip().lower() == "@data") + 1
    out = []
    for line in lines[start:]:
        if line.strip():
            values, label = line.rsplit(":", 1)
            out.append("\t".join([label, *values.split(",")]))
    return "\n".join(out) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dest", default=str(Path(__file__).resolve().parents[1] / "tests" / "data"))
    args = ap.parse_args(argv)
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        wheels = download(Path(tmp))
        with zipfile.ZipFile(wheels["ucr-datasets"]) as z:
            for name in ("Coffee", "BeetleFly"):
                for part in ("TRAIN", "TEST"):
                    (dest / f"{name}_{part}.tsv").write_bytes(z.read(f"ucr_datasets/data/{name}_{part}.tsv"))
        with zipfile.ZipFile(wheels["aeon"]) as z:
            for part in ("TRAIN", "TEST"):
                text = z.read(f"aeon/datasets/data/ItalyPowerDemand/ItalyPowerDemand_{part}.ts").decode()
                (dest / f"ItalyPowerDemand_{part}.tsv").write_text(ts_to_tsv(text))
    for f in sorted(dest.glob("*.tsv")):
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
