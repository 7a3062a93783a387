"""On-disk table cache: one JSON record per ``(space, n)``, written atomically."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .tables import BettiTable, Space, TableValidationError

__all__ = ["CacheError", "TableCache", "default_cache_dir", "cache_name"]

ENV_VAR = "BETTI_CACHE_DIR"


class CacheError(OSError):
    """A cache file exists but does not hold the table its name promises."""


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "moduli_betti"


def cache_name(space: Space, n: int, surface: str | None = None) -> str:
    space = Space(space)
    if space is Space.Hilb:
        if not surface:
            raise ValueError("Hilb tables need a surface name")
        return f"Hilb-{surface}_{n}.json"
    return f"{space.value}_{n}.json"


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


class TableCache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def path(self, space: Space, n: int, surface: str | None = None) -> Path:
        return self.root / cache_name(space, n, surface)

    def has(self, space: Space, n: int, surface: str | None = None) -> bool:
        return self.path(space, n, surface).is_file()

    def load(self, space: Space, n: int, surface: str | None = None) -> BettiTable | None:
        """The cached table, ``None`` if absent; :class:`CacheError` if the file is bad."""
        p = self.path(space, n, surface)
        try:
            text = p.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        try:
            t = BettiTable.loads(text)
        except (json.JSONDecodeError, TableValidationError, UnicodeDecodeError) as exc:
            raise CacheError(f"{p}: {exc}") from None
        if t.space is not Space(space) or t.n != n:
            raise CacheError(f"{p}: holds {t.space.value} n={t.n}, expected {Space(space).value} n={n}")
        return t

    def store(self, table: BettiTable, surface: str | None = None, force: bool = False) -> bool:
        """Write unless a file already exists; returns whether anything was written."""
        p = self.path(table.space, table.n, surface)
        if p.exists() and not force:
            return False
        atomic_write(p, table.dumps() + "\n")
        return True

    def entries(self) -> list[Path]:
        if not self.root.is_dir():
            return []
        return sorted(p for p in self.root.glob("*.json") if not p.name.startswith("."))
