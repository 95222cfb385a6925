# report.py
"""
Verdicts of the command-line problems and their text / json renderings.
"""
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from rich.console import Console
from rich.table import Table


class Answer(str, Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided-resource-cap"
    INCONSISTENT = "inconsistent-typing"
    ERROR = "error"


EXIT_CODES = {
    Answer.YES: 0,
    Answer.NO: 1,
    Answer.INCONSISTENT: 1,
    Answer.UNDECIDED: 2,
    Answer.ERROR: 3,
}


@dataclass
class Verdict:
    problem: str
    answer: Answer
    witness: Dict[str, str] = field(default_factory=dict)  # function or file name -> grammar/regex text
    diagnostics: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    written: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.answer]

    def to_dict(self) -> dict:
        data = asdict(self)
        data["answer"] = self.answer.value
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


_STYLES = {
    Answer.YES: "bold green",
    Answer.NO: "bold red",
    Answer.INCONSISTENT: "bold red",
    Answer.UNDECIDED: "bold yellow",
    Answer.ERROR: "bold magenta",
}


def render(v: Verdict, console: Optional[Console] = None) -> None:
    """Plain report: the answer line, then witness, diagnostics and notes."""
    console = console or Console()
    console.print(f"{v.problem}: [{_STYLES[v.answer]}]{v.answer.value}[/]", highlight=False)
    if v.witness:
        table = Table(show_header=True, header_style="bold")
        table.add_column("slot")
        table.add_column("type")
        for name, text in v.witness.items():
            table.add_row(name, text)
        console.print(table)
    for line in v.diagnostics:
        console.print(f"  {line}", highlight=False, markup=False)
    for line in v.notes:
        console.print(f"  note: {line}", style="dim", highlight=False, markup=False)
    for path in v.written:
        console.print(f"  wrote {path}", highlight=False, markup=False)


def emit(v: Verdict, as_json: bool, console: Optional[Console] = None) -> None:
    console = console or Console()
    if as_json:
        print(v.to_json(), file=console.file)
    else:
        render(v, console)
