"""Built-in example programs: the buffers and the distributed ring."""

from importlib import resources


def corpus_path(name: str):
    """Filesystem path of a bundled .itp program (buffer.itp, ring.itp, demo.itp)."""
    return resources.files(__package__) / name


def corpus_source(name: str) -> str:
    return corpus_path(name).read_text(encoding="utf-8")
