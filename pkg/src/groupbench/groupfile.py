"""Line-oriented key-value group specification files.

Every file carries a `kind:` line; construction-bearing kinds (semidirect
stage-1 witnesses) store their generator matrices as hex row lists and are
rebuilt deterministically by closure on load.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

from .crbuild import CRWitness, build_g1, toy_witness
from .groups import ElementaryAbelian2, FiniteGroup, G2Group, SymmetricGroup


def _parse_kv(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"line {lineno}: expected `key: value`")
        key, _, value = line.partition(":")
        pairs.append((key.strip(), value.strip()))
    return pairs


def _as_dict(pairs: list[tuple[str, str]]) -> dict[str, str]:
    out: dict[str, str] = {}
    for k, v in pairs:
        if k in out and not k.startswith("pi"):
            raise ValueError(f"duplicate key {k!r}")
        out[k] = v
    return out


def write_group_file(obj: Union[FiniteGroup, CRWitness]) -> str:
    if isinstance(obj, CRWitness):
        lines = [
            "kind: semidirect-witness",
            f"n: {obj.n}",
            f"m: {obj.m}",
        ]
        if isinstance(obj.group, ElementaryAbelian2):
            lines[0] = "kind: toy-witness"
            lines.append(f"dim: {obj.group.dim}")
            return "\n".join(lines) + "\n"
        return "\n".join(lines) + "\n"
    if isinstance(obj, ElementaryAbelian2):
        return f"kind: elementary-abelian-2\ndim: {obj.dim}\n"
    if isinstance(obj, SymmetricGroup):
        return f"kind: symmetric\npoints: {obj.points}\n"
    if isinstance(obj, G2Group) and isinstance(obj.inner, ElementaryAbelian2):
        return (
            "kind: normal-form-g2\n"
            f"n: {obj.n}\n"
            "zmode: ybar\n"
            "g1.kind: elementary-abelian-2\n"
            f"g1.dim: {obj.inner.dim}\n"
        )
    raise ValueError(f"cannot serialize {type(obj).__name__}")


def read_group_file(text: str, closure_cap: int = 10**6):
    data = _as_dict(_parse_kv(text))
    kind = data.get("kind")
    if kind == "elementary-abelian-2":
        return ElementaryAbelian2(int(data["dim"]))
    if kind == "symmetric":
        return SymmetricGroup(int(data["points"]))
    if kind == "normal-form-g2":
        if data.get("g1.kind") != "elementary-abelian-2":
            raise ValueError("only elementary abelian inner groups are file-backed")
        n = int(data["n"])
        return G2Group.toy(n, int(data["g1.dim"]))
    if kind == "toy-witness":
        return toy_witness(int(data["n"]), int(data["dim"]))
    if kind == "semidirect-witness":
        return build_g1(int(data["n"]), int(data["m"]), cap=closure_cap)
    raise ValueError(f"unknown kind {kind!r}")


def save(obj, path: Union[str, Path]) -> None:
    Path(path).write_text(write_group_file(obj), encoding="utf-8")


def load(path: Union[str, Path], closure_cap: int = 10**6):
    return read_group_file(Path(path).read_text(encoding="utf-8"), closure_cap)
