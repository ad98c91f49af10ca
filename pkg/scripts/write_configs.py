"""Dump every named fixture into configs/<name>.json."""

from pathlib import Path

from indyn import fixtures

OUT = Path(__file__).resolve().parent.parent / "configs"


def main():
    OUT.mkdir(exist_ok=True)
    for name in fixtures.DOCS:
        (OUT / f"{name}.json").write_text(fixtures.document(name))
        print(OUT / f"{name}.json")


if __name__ == "__main__":
    main()
