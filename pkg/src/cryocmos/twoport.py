"""Two-port network algebra: S/Y/Z/H/ABCD conversions, Touchstone v1 I/O,
and open-short de-embedding.

Matrices are stored as an (N, 2, 2) complex array over a strictly
ascending frequency grid in Hz. Conversions route through Z with the
textbook closed forms; a singular matrix at any frequency raises an error
naming that frequency. Frequency grids of a de-embedding set must match
exactly (silent interpolation hides measurement mistakes).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

REPRESENTATIONS = ("S", "Y", "Z", "H", "ABCD")

_FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}


@dataclass(frozen=True)
class TwoPort:
    freqs: np.ndarray          # Hz, strictly ascending
    mats: np.ndarray           # (N, 2, 2) complex
    rep: str = "S"
    z0: float = 50.0

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        mats = np.asarray(self.mats, dtype=complex)
        if freqs.ndim != 1 or freqs.size == 0:
            raise ValueError("freqs must be a non-empty 1-D array")
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("frequencies must be strictly ascending")
        if mats.shape != (freqs.size, 2, 2):
            raise ValueError(f"mats must have shape ({freqs.size}, 2, 2), got {mats.shape}")
        if self.rep not in REPRESENTATIONS:
            raise ValueError(f"rep must be one of {REPRESENTATIONS}, got {self.rep!r}")
        if not self.z0 > 0:
            raise ValueError(f"z0 must be positive, got {self.z0}")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "mats", mats)

    @property
    def n_points(self) -> int:
        return self.freqs.size


@dataclass(frozen=True)
class DeembedSet:
    dut: TwoPort
    open: TwoPort
    short: TwoPort | None = None

    def __post_init__(self):
        for name, net in (("open", self.open), ("short", self.short)):
            if net is None:
                continue
            if not np.array_equal(net.freqs, self.dut.freqs):
                raise ValueError(
                    f"frequency grid mismatch between dut "
                    f"({self.dut.n_points} pts, {self.dut.freqs[0]:g}-{self.dut.freqs[-1]:g} Hz) "
                    f"and {name} ({net.n_points} pts, {net.freqs[0]:g}-{net.freqs[-1]:g} Hz)"
                )


def _entries(m):
    return m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]


def _assemble(a11, a12, a21, a22):
    out = np.empty(a11.shape + (2, 2), dtype=complex)
    out[:, 0, 0], out[:, 0, 1] = a11, a12
    out[:, 1, 0], out[:, 1, 1] = a21, a22
    return out


def _guard_denominator(den, freqs, what):
    bad = ~np.isfinite(den) | (np.abs(den) == 0.0)
    if np.any(bad):
        raise ValueError(
            f"singular matrix while converting {what} at {freqs[np.argmax(bad)]:g} Hz"
        )
    return den


def _to_s(net: TwoPort) -> np.ndarray:
    """Direct X->S closed forms (S exists for every finite network)."""
    m, f, z0 = net.mats, net.freqs, net.z0
    if net.rep == "S":
        return m.copy()
    if net.rep in ("Z", "Y"):
        # normalize to z: S = (z - I)(z + I)^-1 with z = Z/z0 or (z0*Y)^-1 form
        if net.rep == "Z":
            a11, a12, a21, a22 = (x / z0 for x in _entries(m))
            den = _guard_denominator(
                (a11 + 1) * (a22 + 1) - a12 * a21, f, "Z->S"
            )
            s11 = ((a11 - 1) * (a22 + 1) - a12 * a21) / den
            s22 = ((a11 + 1) * (a22 - 1) - a12 * a21) / den
            s12 = 2 * a12 / den
            s21 = 2 * a21 / den
            return _assemble(s11, s12, s21, s22)
        a11, a12, a21, a22 = (x * z0 for x in _entries(m))
        den = _guard_denominator((1 + a11) * (1 + a22) - a12 * a21, f, "Y->S")
        s11 = ((1 - a11) * (1 + a22) + a12 * a21) / den
        s22 = ((1 + a11) * (1 - a22) + a12 * a21) / den
        s12 = -2 * a12 / den
        s21 = -2 * a21 / den
        return _assemble(s11, s12, s21, s22)
    if net.rep == "H":
        h11, h12, h21, h22 = _entries(m)
        a, d = h11 / z0, h22 * z0
        den = _guard_denominator((a + 1) * (d + 1) - h12 * h21, f, "H->S")
        s11 = ((a - 1) * (d + 1) - h12 * h21) / den
        s12 = 2 * h12 / den
        s21 = -2 * h21 / den
        s22 = ((a + 1) * (1 - d) + h12 * h21) / den
        return _assemble(s11, s12, s21, s22)
    # ABCD
    a, b, c, d = _entries(m)
    bn, cn = b / z0, c * z0
    den = _guard_denominator(a + bn + cn + d, f, "ABCD->S")
    s11 = (a + bn - cn - d) / den
    s12 = 2 * (a * d - b * c) / den
    s21 = 2.0 / den
    s22 = (-a + bn - cn + d) / den
    return _assemble(s11, s12, s21, s22)


def _from_s(s: np.ndarray, freqs: np.ndarray, rep: str, z0: float) -> np.ndarray:
    if rep == "S":
        return s
    s11, s12, s21, s22 = _entries(s)
    if rep == "Z":
        den = _guard_denominator((1 - s11) * (1 - s22) - s12 * s21, freqs, "S->Z")
        z11 = z0 * ((1 + s11) * (1 - s22) + s12 * s21) / den
        z22 = z0 * ((1 - s11) * (1 + s22) + s12 * s21) / den
        z12 = z0 * 2 * s12 / den
        z21 = z0 * 2 * s21 / den
        return _assemble(z11, z12, z21, z22)
    if rep == "Y":
        den = _guard_denominator((1 + s11) * (1 + s22) - s12 * s21, freqs, "S->Y")
        y11 = ((1 - s11) * (1 + s22) + s12 * s21) / (den * z0)
        y22 = ((1 + s11) * (1 - s22) + s12 * s21) / (den * z0)
        y12 = -2 * s12 / (den * z0)
        y21 = -2 * s21 / (den * z0)
        return _assemble(y11, y12, y21, y22)
    if rep == "H":
        den = _guard_denominator((1 - s11) * (1 + s22) + s12 * s21, freqs, "S->H")
        h11 = z0 * ((1 + s11) * (1 + s22) - s12 * s21) / den
        h12 = 2 * s12 / den
        h21 = -2 * s21 / den
        h22 = ((1 - s11) * (1 - s22) - s12 * s21) / (den * z0)
        return _assemble(h11, h12, h21, h22)
    # ABCD
    den = _guard_denominator(2 * s21, freqs, "S->ABCD")
    a = ((1 + s11) * (1 - s22) + s12 * s21) / den
    b = z0 * ((1 + s11) * (1 + s22) - s12 * s21) / den
    c = ((1 - s11) * (1 - s22) - s12 * s21) / (den * z0)
    d = ((1 - s11) * (1 + s22) + s12 * s21) / den
    return _assemble(a, b, c, d)


def convert(net: TwoPort, target_rep: str) -> TwoPort:
    """Exact textbook conversion between S/Y/Z/H/ABCD representations.

    Routed through S (the only representation every finite network has);
    a singular step raises an error naming the offending frequency.
    """
    if target_rep not in REPRESENTATIONS:
        raise ValueError(f"target must be one of {REPRESENTATIONS}, got {target_rep!r}")
    if target_rep == net.rep:
        return replace(net, mats=net.mats.copy())
    s = _to_s(net)
    out = _from_s(s, net.freqs, target_rep, net.z0)
    if not np.all(np.isfinite(out)):
        bad = ~np.all(np.isfinite(out), axis=(1, 2))
        raise ValueError(
            f"singular matrix while converting {net.rep}->{target_rep} "
            f"at {net.freqs[np.argmax(bad)]:g} Hz"
        )
    return TwoPort(net.freqs, out, rep=target_rep, z0=net.z0)


class TouchstoneError(ValueError):
    pass


def read_touchstone(text: str) -> TwoPort:
    """Parse a Touchstone v1 2-port .s2p document.

    Option line grammar: ``# <freq-unit> S <RI|MA|DB> R <z0>``. Data lines
    carry 9 columns (f, S11, S21, S12, S22 as value pairs). Noise-parameter
    sections (5-column lines) are rejected.
    """
    option = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if option is not None:
                raise TouchstoneError(f"line {lineno}: second option line")
            option = _parse_option_line(line, lineno)
            continue
        if option is None:
            raise TouchstoneError(f"line {lineno}: data before option line")
        fields = line.split()
        if len(fields) == 5:
            raise TouchstoneError(
                f"line {lineno}: noise-parameter section not supported (5 columns)"
            )
        if len(fields) != 9:
            raise TouchstoneError(f"line {lineno}: expected 9 columns, got {len(fields)}")
        try:
            vals = [float(x) for x in fields]
        except ValueError as exc:
            raise TouchstoneError(f"line {lineno}: {exc}") from None
        f_hz = vals[0] * option["scale"]
        if rows and f_hz <= rows[-1][0]:
            raise TouchstoneError(f"line {lineno}: frequencies not strictly ascending")
        rows.append((f_hz, vals[1:]))
    if option is None:
        raise TouchstoneError("missing option line")
    if not rows:
        raise TouchstoneError("no data lines")

    freqs = np.array([f for f, _ in rows])
    mats = np.empty((len(rows), 2, 2), dtype=complex)
    fmt = option["format"]
    for k, (_, v) in enumerate(rows):
        # touchstone column order: S11, S21, S12, S22
        s11, s21, s12, s22 = (_pair_to_complex(v[i], v[i + 1], fmt) for i in (0, 2, 4, 6))
        mats[k] = [[s11, s12], [s21, s22]]
    return TwoPort(freqs, mats, rep="S", z0=option["z0"])


def _parse_option_line(line: str, lineno: int) -> dict:
    tokens = line[1:].split()
    if len(tokens) != 5:
        raise TouchstoneError(
            f"line {lineno}: malformed option line, expected "
            f"'# <freq-unit> S <RI|MA|DB> R <z0>'"
        )
    unit, param, fmt, rtok, z0tok = tokens
    if unit.lower() not in _FREQ_UNITS:
        raise TouchstoneError(f"line {lineno}: unknown frequency unit {unit!r}")
    if param.upper() != "S":
        raise TouchstoneError(f"line {lineno}: only S-parameter files supported, got {param!r}")
    if fmt.upper() not in ("RI", "MA", "DB"):
        raise TouchstoneError(f"line {lineno}: unknown format {fmt!r}")
    if rtok.upper() != "R":
        raise TouchstoneError(f"line {lineno}: expected 'R', got {rtok!r}")
    try:
        z0 = float(z0tok)
    except ValueError:
        raise TouchstoneError(f"line {lineno}: bad reference impedance {z0tok!r}") from None
    return {"scale": _FREQ_UNITS[unit.lower()], "format": fmt.upper(), "z0": z0}


def _pair_to_complex(a: float, b: float, fmt: str) -> complex:
    if fmt == "RI":
        return complex(a, b)
    if fmt == "MA":
        return a * np.exp(1j * np.deg2rad(b))
    return 10.0 ** (a / 20.0) * np.exp(1j * np.deg2rad(b))   # DB


def write_touchstone(net: TwoPort) -> str:
    """Serialize as Touchstone v1 (Hz, RI), losslessly round-trippable."""
    s = net if net.rep == "S" else convert(net, "S")
    lines = [f"# Hz S RI R {s.z0!r}"]
    for f, m in zip(s.freqs, s.mats):
        vals = [m[0, 0], m[1, 0], m[0, 1], m[1, 1]]   # S11 S21 S12 S22
        parts = [repr(float(f))]
        for v in vals:
            parts.append(repr(float(v.real)))
            parts.append(repr(float(v.imag)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def deembed_open_short(dset: DeembedSet) -> TwoPort:
    """Classic open-short de-embedding (Y-subtraction, then Z-subtraction).

    With no short standard, only the parallel (open) Y-subtraction is
    applied. Result is returned in S representation.
    """
    freqs, z0 = dset.dut.freqs, dset.dut.z0
    y_dut = convert(dset.dut, "Y").mats
    y_open = convert(dset.open, "Y").mats
    y1 = TwoPort(freqs, y_dut - y_open, rep="Y", z0=z0)
    if dset.short is None:
        return convert(y1, "S")
    y_short = convert(dset.short, "Y").mats
    z_fix = convert(TwoPort(freqs, y_short - y_open, rep="Y", z0=z0), "Z").mats
    z2 = convert(y1, "Z").mats - z_fix
    return convert(TwoPort(freqs, z2, rep="Z", z0=z0), "S")
