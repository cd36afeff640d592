"""JSON interchange for evaluated fiducials.

Components are stored as pairs of decimal strings carrying ``digits``
significant digits, so a file written at precision P reads back into the
same decimal strings when re-exported at P.
"""

from __future__ import annotations

import json
from pathlib import Path

import mpmath

from .evaluation import Fiducial
from .heisenberg import check_layout
from .numeric import MIN_DIGITS, kernel

FORMAT_VERSION = 1
BASIS = "paper-monomial"


class FiducialFileError(ValueError):
    pass


def _decimal(x, digits: int) -> str:
    return mpmath.libmp.to_str(x._mpf_, digits)


def fiducial_to_dict(fid: Fiducial) -> dict:
    k = kernel(fid.digits)
    comps = []
    for c in fid.components:
        c = k.convert(c)
        c = k.ctx.mpc(c)
        comps.append([_decimal(c.real, fid.digits), _decimal(c.imag, fid.digits)])
    return {
        "format_version": FORMAT_VERSION,
        "label": fid.label,
        "d": fid.d,
        "digits": fid.digits,
        "basis": BASIS,
        "block_layout": list(fid.layout),
        "normalized": fid.normalized,
        "branches": dict(sorted(fid.branches.items())),
        "components": comps,
    }


def dumps(fid: Fiducial) -> str:
    return json.dumps(fiducial_to_dict(fid), indent=1) + "\n"


def write_fiducial(fid: Fiducial, path) -> None:
    Path(path).write_text(dumps(fid), encoding="utf-8")


def fiducial_from_dict(data: dict, digits: int | None = None) -> Fiducial:
    try:
        if data.get("format_version") != FORMAT_VERSION:
            raise FiducialFileError(f"unsupported format_version {data.get('format_version')!r}")
        if data.get("basis") != BASIS:
            raise FiducialFileError(f"unsupported basis {data.get('basis')!r}")
        d = int(data["d"])
        stored = int(data["digits"])
        layout = check_layout(data["block_layout"], d)
        pairs = data["components"]
        label = str(data["label"])
        branches = {str(k): int(v) for k, v in data.get("branches", {}).items()}
        normalized = bool(data.get("normalized", True))
    except (KeyError, TypeError) as exc:
        raise FiducialFileError(f"malformed fiducial file: {exc}") from None
    if len(pairs) != d:
        raise FiducialFileError(f"{len(pairs)} components for d = {d}")
    digits = stored if digits is None else digits
    if digits < MIN_DIGITS:
        raise FiducialFileError(f"precision {digits} is below the minimum of {MIN_DIGITS}")
    k = kernel(digits)
    try:
        comps = [k.ctx.mpc(k.ctx.mpf(re), k.ctx.mpf(im)) for re, im in pairs]
    except (ValueError, TypeError) as exc:
        raise FiducialFileError(f"bad component value: {exc}") from None
    return Fiducial(label, d, comps, layout, digits, None, normalized, branches)


def loads(text: str, digits: int | None = None) -> Fiducial:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FiducialFileError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FiducialFileError("fiducial file must hold a JSON object")
    return fiducial_from_dict(data, digits)


def read_fiducial(path, digits: int | None = None) -> Fiducial:
    return loads(Path(path).read_text(encoding="utf-8"), digits)
