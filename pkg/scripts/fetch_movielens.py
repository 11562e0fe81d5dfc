"""Place MovieLens 100k ``u.data`` under data/ml-100k/.

Tries the GroupLens zip first. If that host is unreachable, rebuilds the file
from the copy bundled in the RecBole wheel (``ml-100k.inter`` is ``u.data``
plus a header line, rows in the original order).
"""

import argparse
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

GROUPLENS = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
DEFAULT_OUT = Path(__file__).resolve().parents[1] / "data" / "ml-100k" / "u.data"


def from_grouplens() -> str:
    with urllib.request.urlopen(GROUPLENS, timeout=30) as resp:
        z = zipfile.ZipFile(io.BytesIO(resp.read()))
    return z.read("ml-100k/u.data").decode("latin-1")


def from_recbole_wheel() -> str:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "recbole==1.2.1", "--no-deps", "-q", "-d", tmp],
            check=True,
        )
        wheel = next(Path(tmp).glob("recbole-*.whl"))
        text = zipfile.ZipFile(wheel).read("recbole/dataset_example/ml-100k/ml-100k.inter").decode()
    lines = text.splitlines()
    if not lines[0].startswith("user_id"):
        raise RuntimeError("unexpected header in ml-100k.inter")
    return "\n".join(lines[1:]) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args()

    try:
        text = from_grouplens()
        source = "grouplens"
    except OSError as e:
        print(f"grouplens download failed ({e}); using the RecBole wheel copy")
        text = from_recbole_wheel()
        source = "recbole wheel"

    n_lines = text.count("\n")
    if n_lines != 100_000:
        sys.exit(f"expected 100000 ratings, got {n_lines}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(text)
    print(f"wrote {args.out} ({n_lines} ratings, from {source})")


if __name__ == "__main__":
    main()
