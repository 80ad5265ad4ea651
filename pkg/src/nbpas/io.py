"""Text formats: labeled parity-check files and key-value run configs.

Parity-check file::

    q p primitive_poly m_c n_c d_v d_c
    # lifting N s1,s2 s1,s2 ...          (optional)
    col:label col:label ...              (one line per check, 1-based columns)

``d_v``/``d_c`` are 0 for irregular matrices. Other ``#`` lines are
comments.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .code import LabeledParityCheck
from .gf import Field


class FormatError(ValueError):
    """Malformed input file; the message names the offending line."""


def format_code(H: LabeledParityCheck) -> str:
    F = H.field
    lines = [f"{F.q} {F.p} {F.primitive_poly} {H.m_c} {H.n_c} {H.d_v} {H.d_c}"]
    if H.lifting is not None:
        N, shifts = H.lifting
        lines.append("# lifting " + " ".join([str(N)] + [f"{a},{b}" for a, b in shifts]))
    for row in H.rows:
        lines.append(" ".join(f"{c + 1}:{h}" for c, h in row))
    return "\n".join(lines) + "\n"


def save_code(H: LabeledParityCheck, path) -> None:
    Path(path).write_text(format_code(H))


def parse_code(text: str, field: Field | None = None, source: str = "<string>") -> LabeledParityCheck:
    """Parse the parity-check format; ``field`` (optional) must match the header."""
    lifting = None
    body = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "lifting":
                try:
                    N = int(parts[1])
                    shifts = tuple(tuple(int(v) for v in s.split(",")) for s in parts[2:])
                    if any(len(s) != 2 for s in shifts):
                        raise ValueError
                except (IndexError, ValueError):
                    raise FormatError(f"{source}:{no}: bad lifting line") from None
                lifting = (N, shifts)
            continue
        if line:
            body.append((no, line))
    if not body:
        raise FormatError(f"{source}: missing header line")
    no, header = body[0]
    try:
        q, p, poly, m_c, n_c, d_v, d_c = (int(v) for v in header.split())
    except ValueError:
        raise FormatError(f"{source}:{no}: header must be 'q p primitive_poly m_c n_c d_v d_c'") from None
    if q != 1 << p:
        raise FormatError(f"{source}:{no}: q={q} is not 2^p for p={p}")
    try:
        F = Field(p, poly)
    except ValueError as exc:
        raise FormatError(f"{source}:{no}: {exc}") from None
    if field is not None and (field.q != F.q or field.primitive_poly != F.primitive_poly):
        raise FormatError(f"{source}: file is over {F!r}, expected {field!r}")
    rows = []
    for no, line in body[1:]:
        row = []
        for tok in line.split():
            try:
                c, h = tok.split(":")
                row.append((int(c) - 1, int(h)))
            except ValueError:
                raise FormatError(f"{source}:{no}: bad entry {tok!r}, expected col:label") from None
        rows.append((no, row))
    if len(rows) != m_c:
        last = body[-1][0]
        raise FormatError(f"{source}:{last}: expected {m_c} check rows, found {len(rows)}")
    try:
        H = LabeledParityCheck(F, n_c, [r for _, r in rows], lifting)
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None
    if (d_v and H.d_v != d_v) or (d_c and H.d_c != d_c):
        raise FormatError(f"{source}:{body[0][0]}: header degrees ({d_v}, {d_c}) disagree with the rows")
    return H


def load_code(path, field: Field | None = None) -> LabeledParityCheck:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_code(text, field, str(path))


# --- run configuration ----------------------------------------------------


@dataclass
class RunConfig:
    """Flat run configuration; every field maps to a ``key = value`` line."""

    field_order: int = 64
    dc: int = 8
    lifting_n: int = 24
    m_ask: int = 3
    rate_t: str = "3/2"
    n_channel_uses: int = 192
    seed: int = 1
    snr_start_db: float = 8.0
    snr_stop_db: float = 11.0
    snr_step_db: float = 0.25
    max_frames: int = 100_000
    min_frame_errors: int = 100
    max_iters: int = 200
    workers: int = 1
    signaling: str = "shaped"
    code_seed: int = 0
    de_population: int = 100_000
    de_max_iter: int = 500
    de_target: float = 1e-5
    de_stall: int = 0

    def validate(self) -> None:
        if self.signaling not in ("shaped", "uniform"):
            raise ValueError(f"signaling must be 'shaped' or 'uniform', got {self.signaling!r}")
        if self.snr_step_db <= 0:
            raise ValueError("snr_step_db must be positive")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be at least 1")
        if self.max_frames < 1 or self.workers < 1 or self.max_iters < 1:
            raise ValueError("max_frames, workers and max_iters must be positive")

    @property
    def snr_grid(self) -> list[float]:
        n = int(round((self.snr_stop_db - self.snr_start_db) / self.snr_step_db))
        return [round(self.snr_start_db + i * self.snr_step_db, 10) for i in range(max(n, 0) + 1)]


def parse_config(text: str, source: str = "<string>", base: RunConfig | None = None) -> RunConfig:
    cfg = RunConfig() if base is None else RunConfig(**{f.name: getattr(base, f.name) for f in fields(base)})
    types = {f.name: f.type for f in fields(RunConfig)}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{source}:{no}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise FormatError(f"{source}:{no}: unknown key {key!r}")
        kind = types[key]
        try:
            if kind == "int":
                v = int(val)
            elif kind == "float":
                v = float(val)
            else:
                v = val
        except ValueError:
            raise FormatError(f"{source}:{no}: {key} needs a {kind}, got {val!r}") from None
        setattr(cfg, key, v)
    try:
        cfg.validate()
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None
    return cfg


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path), base)


def format_config(cfg: RunConfig) -> str:
    return "".join(f"{f.name} = {getattr(cfg, f.name)}\n" for f in fields(cfg))
