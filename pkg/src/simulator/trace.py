"""
Trace lines
One line per slot, phase and plan entry; bits are written top level first, links separated by '|'
"""

from typing import Dict, List, Optional

from ..channel.core import Node

PHASES = ("fwd", "bwd")


def bits_text(levels: Optional[List[List[int]]]) -> str:
    if not levels:
        return "-"
    return "|".join("".join(str(int(b)) for b in link) for link in levels)


def format_line(slot: int, phase: int, entry: int, signals: Dict[Node, Optional[List[List[int]]]],
                kind: str = "tx") -> str:
    """slot=<t> phase=<fwd|bwd> entry=<e> [rx] U1=<bits> U2=<bits> U1T=<bits> U2T=<bits>"""
    head = f"slot={slot} phase={PHASES[phase]} entry={entry}"
    if kind == "rx":
        head += " rx"
    body = " ".join(f"{node.value}={bits_text(signals.get(node))}" for node in Node)
    return f"{head} {body}"


def parse_line(line: str) -> Dict[str, object]:
    fields: Dict[str, object] = {"kind": "tx"}
    for token in line.split():
        if token == "rx":
            fields["kind"] = "rx"
            continue
        key, _, value = token.partition("=")
        if key in ("slot", "entry"):
            fields[key] = int(value)
        elif key == "phase":
            fields[key] = value
        else:
            fields[key] = [] if value == "-" else value.split("|")
    return fields
