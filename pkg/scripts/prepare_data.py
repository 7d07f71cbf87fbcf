#!/usr/bin/env python3
"""Extract the vendored dataset archives under data/.

Produces data/movie_reviews/{pos,neg}/*.txt and
data/subjectivity/{quote,plot}.tok.gt9.5000. Safe to re-run.
"""

import sys
import zipfile
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"
ARCHIVES = {
    "movie_reviews.zip": "movie_reviews",
    "subjectivity.zip": "subjectivity",
}


def main() -> int:
    missing = []
    for zip_name, member_dir in ARCHIVES.items():
        archive = DATA / zip_name
        target = DATA / member_dir
        if target.is_dir():
            print(f"already extracted: {target}")
            continue
        if not archive.is_file():
            missing.append(archive)
            continue
        with zipfile.ZipFile(archive) as zf:
            zf.extractall(DATA)
        print(f"extracted {archive.name} -> {target}")
    if missing:
        for archive in missing:
            print(f"missing archive: {archive} (see data/README.md)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
