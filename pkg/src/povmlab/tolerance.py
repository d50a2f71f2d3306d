"""Numerical tolerances shared by every check in the package.

One :class:`Tolerance` value carries all thresholds.  Functions accept an
optional ``tol`` argument; when it is omitted the process default is used,
which honours the ``POVMLAB_TOLERANCE`` environment variable.

The variable accepts either a single float (applied to every field) or a
comma separated list of ``field=value`` pairs, e.g. ``recon=1e-8,psd=1e-10``.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

ENV_VAR = "POVMLAB_TOLERANCE"


@dataclass(frozen=True)
class Tolerance:
    herm: float = 1e-9
    psd: float = 1e-9
    recon: float = 1e-9
    tr: float = 1e-9
    norm: float = 1e-9
    prob: float = 1e-9

    def replace(self, **changes: float) -> "Tolerance":
        return dataclasses.replace(self, **changes)

    @classmethod
    def parse(cls, text: str, base: "Tolerance | None" = None) -> "Tolerance":
        """Parse ``"1e-8"`` or ``"recon=1e-8,psd=1e-10"`` on top of ``base``."""
        base = base or cls()
        text = text.strip()
        if not text:
            return base
        names = {f.name for f in dataclasses.fields(cls)}
        if "=" not in text:
            value = _positive(text)
            return cls(**{name: value for name in names})
        changes = {}
        for item in text.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in names:
                raise ValueError(f"unknown tolerance field in {item!r}")
            changes[key] = _positive(value)
        return base.replace(**changes)


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise ValueError(f"tolerance must be positive, got {text!r}")
    return value


_default: Tolerance | None = None


def default_tolerance() -> Tolerance:
    global _default
    if _default is None:
        _default = Tolerance.parse(os.environ.get(ENV_VAR, ""))
    return _default


def set_default_tolerance(tol: Tolerance | None) -> None:
    """Override the process default; ``None`` re-reads the environment."""
    global _default
    _default = tol


def resolve(tol: Tolerance | None) -> Tolerance:
    return default_tolerance() if tol is None else tol
