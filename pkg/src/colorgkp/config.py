"""Flat key-value experiment configs with strict validation.

Format: one ``key = value`` per line, ``#`` starts a comment, blank lines
ignored.  Keys are command-specific; unknown or duplicate keys are rejected
with the offending line number so that typos cannot silently corrupt a
sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["ConfigError", "RawConfig", "read_config"]


class ConfigError(Exception):
    """Malformed configuration; message carries file and line context."""


@dataclass
class RawConfig:
    path: str
    entries: dict  # key -> (value string, line number)

    def line(self, key: str) -> int:
        return self.entries[key][1]

    def _fail(self, key: str, msg: str):
        line = self.entries[key][1] if key in self.entries else "?"
        raise ConfigError(f"{self.path}:{line}: {msg}")

    def require(self, allowed: dict, required: tuple):
        """Check keys against {key: description}; raise on unknown/missing."""
        for key, (_, line) in self.entries.items():
            if key not in allowed:
                known = ", ".join(sorted(allowed))
                raise ConfigError(f"{self.path}:{line}: unknown key "
                                  f"{key!r} (known keys: {known})")
        for key in required:
            if key not in self.entries:
                raise ConfigError(f"{self.path}: missing required key "
                                  f"{key!r}")

    def has(self, key: str) -> bool:
        return key in self.entries

    def get_str(self, key: str, default: str | None = None) -> str:
        if key not in self.entries:
            if default is None:
                self._fail(key, f"missing key {key!r}")
            return default
        return self.entries[key][0]

    def get_int(self, key: str, default: int | None = None) -> int:
        if key not in self.entries:
            if default is None:
                self._fail(key, f"missing key {key!r}")
            return default
        raw = self.entries[key][0]
        try:
            return int(raw)
        except ValueError:
            self._fail(key, f"{key} must be an integer, got {raw!r}")

    def get_float(self, key: str, default: float | None = None) -> float:
        if key not in self.entries:
            if default is None:
                self._fail(key, f"missing key {key!r}")
            return default
        raw = self.entries[key][0]
        try:
            return float(raw)
        except ValueError:
            self._fail(key, f"{key} must be a number, got {raw!r}")

    def get_bool(self, key: str, default: bool | None = None) -> bool:
        if key not in self.entries:
            if default is None:
                self._fail(key, f"missing key {key!r}")
            return default
        raw = self.entries[key][0].lower()
        if raw in ("true", "yes", "1", "on"):
            return True
        if raw in ("false", "no", "0", "off"):
            return False
        self._fail(key, f"{key} must be true/false, got {raw!r}")

    def get_int_list(self, key: str, default=None) -> tuple[int, ...]:
        if key not in self.entries:
            if default is None:
                self._fail(key, f"missing key {key!r}")
            return tuple(default)
        raw = self.entries[key][0]
        try:
            return tuple(int(x.strip()) for x in raw.split(",") if x.strip())
        except ValueError:
            self._fail(key, f"{key} must be a comma list of integers")

    def get_float_list(self, key: str, default=None) -> tuple[float, ...]:
        if key not in self.entries:
            if default is None:
                self._fail(key, f"missing key {key!r}")
            return tuple(default)
        raw = self.entries[key][0]
        try:
            return tuple(float(x.strip())
                         for x in raw.split(",") if x.strip())
        except ValueError:
            self._fail(key, f"{key} must be a comma list of numbers")

    def get_str_list(self, key: str, default=None) -> tuple[str, ...]:
        if key not in self.entries:
            if default is None:
                self._fail(key, f"missing key {key!r}")
            return tuple(default)
        raw = self.entries[key][0]
        return tuple(x.strip() for x in raw.split(",") if x.strip())

    def get_index_value_pairs(self, key: str) -> list[tuple[int, float]]:
        """Parse 'i:v, j:w' pairs (qubit index to shift value)."""
        raw = self.entries[key][0]
        out = []
        for item in raw.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                idx, val = item.split(":")
                out.append((int(idx.strip()), float(val.strip())))
            except ValueError:
                self._fail(key, f"{key} entries must look like "
                           f"'index:value', got {item!r}")
        return out


def read_config(path) -> RawConfig:
    entries: dict = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', "
                              f"got {raw.strip()!r}")
        key, value = text.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in entries:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r} "
                              f"(first set on line {entries[key][1]})")
        entries[key] = (value, lineno)
    return RawConfig(path=str(path), entries=entries)
