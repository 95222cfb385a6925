# cli.py
"""
Command-line surface: `dxd validate | cons | synth | check | find` on files,
and `dxd word check | find` on word designs given inline.

Exit codes: 0 yes, 1 no (or inconsistent typing), 2 undecided by a resource
cap, 3 input or other errors.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import typer
from rich.console import Console

from dxd import automata as fa
from dxd import regex as rx
from dxd import tree_typing as tt
from dxd import word_typing as wt
from dxd.bottom_up import BottomUpDesign, build_t_tau, cons, synthesize_type
from dxd.config import AppConfig, load_config
from dxd.document import KernelDoc, first_violation, parse_kernel, validate
from dxd.errors import (ArityError, ConfigError, DxdError, InconsistentTypingError,
                        ResourceCapExceeded)
from dxd.log import setup_logging, verbosity_level
from dxd.report import Answer, Verdict, emit
from dxd.schema import GrammarClass, Mechanism, TreeGrammar, dump_grammar, load_grammar
from dxd.tree_automata import grammar_counterexample
from dxd.trees import function_name, parse_tree, path_text, tree_text

logger = logging.getLogger(__name__)

app = typer.Typer(help="Distributed XML design: typings of kernel documents.",
                  no_args_is_help=True, add_completion=False)
word_app = typer.Typer(help="Word designs given inline.", no_args_is_help=True)
app.add_typer(word_app, name="word")

TARGET_FILE = "target.grammar"
KERNEL_FILE = "kernel.tree"
PERFECT_BOX_NOTE = "perfect box typing decided by the word criterion applied to boxes (extended criterion)"


@dataclass
class State:
    config: AppConfig
    as_json: bool
    console: Console


# ----- Plumbing ------

def _state(ctx: typer.Context) -> State:
    return ctx.obj


def _finish(state: State, problem: str, compute: Callable[[], Verdict]) -> None:
    try:
        verdict = compute()
    except ResourceCapExceeded as e:
        verdict = Verdict(problem, Answer.UNDECIDED, diagnostics=[str(e), f"cap: {e.cap}"])
    except InconsistentTypingError as e:
        verdict = Verdict(problem, Answer.INCONSISTENT, diagnostics=[str(e)])
    except (DxdError, OSError) as e:
        verdict = Verdict(problem, Answer.ERROR, diagnostics=[str(e)])
    emit(verdict, state.as_json, state.console)
    raise typer.Exit(verdict.exit_code)


def _read(path: Path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _grammar(path: Path, state: State, notes: List[str]) -> TreeGrammar:
    g, was_reduced = load_grammar(_read(path), str(path), state.config.caps)
    if not was_reduced:
        notes.append(f"{path}: grammar was not reduced; useless names were dropped")
    return g


def _kernel(path: Path) -> KernelDoc:
    return parse_kernel(_read(path), str(path))


def _bindings(entries: Sequence[str]) -> Dict[str, str]:
    """`f1=value` options keyed by function name."""
    out = {}
    for entry in entries:
        name, sep, value = entry.partition("=")
        if not sep or not name.strip():
            raise ArityError(f"typing option {entry!r} is not of the form f=value")
        out[function_name(name.strip())] = value.strip()
    return out


def _ordered(functions: Sequence[str], bound: Dict[str, str]) -> List[str]:
    missing = [f for f in functions if f not in bound]
    extra = sorted(set(bound) - set(functions))
    if missing or extra:
        raise ArityError(f"typing must bind exactly {', '.join(functions) or 'no function'}"
                         f" (missing: {', '.join(missing) or '-'}, unknown: {', '.join(extra) or '-'})")
    return [bound[f] for f in functions]


def _design_files(target: Optional[Path], kernel: Optional[Path],
                  design: Optional[Path]) -> Tuple[Path, Path]:
    if design is not None:
        return target or design / TARGET_FILE, kernel or design / KERNEL_FILE
    if target is None or kernel is None:
        raise ConfigError("give --design DIR or both --target and --kernel")
    return target, kernel


def _tree_design(state: State, target: Optional[Path], kernel: Optional[Path],
                 design: Optional[Path], kind: Optional[GrammarClass],
                 notes: List[str]) -> tt.TreeDesign:
    target_file, kernel_file = _design_files(target, kernel, design)
    return tt.TreeDesign(_grammar(target_file, state, notes), _kernel(kernel_file), kind)


def _typing_files(d: tt.TreeDesign, entries: Sequence[str], design: Optional[Path]) -> List[Path]:
    bound = _bindings(entries)
    if design is not None:
        for f in d.kernel.functions:
            bound.setdefault(f, str(design / f"{f}.grammar"))
    return [Path(p) for p in _ordered(d.kernel.functions, bound)]


def _witness(functions: Sequence[str], typing: Sequence[TreeGrammar]) -> Dict[str, str]:
    return {f"@{f}": dump_grammar(g) for f, g in zip(functions, typing)}


def _write(out_dir: Optional[Path], files: Dict[str, str]) -> List[str]:
    if out_dir is None:
        return []
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in files.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(str(path))
    return written


def _nfa_text(a: fa.Nfa, chars: bool = False) -> str:
    return rx.to_text(rx.from_nfa(fa.canonical(a)), char_symbols=chars)


def _word_text(w: Sequence[str], chars: bool = False) -> str:
    if not w:
        return "ε"
    return "".join(w) if chars else " ".join(w)


# ----- Global options ------

@app.callback()
def main(ctx: typer.Context,
         verbose: int = typer.Option(0, "--verbose", "-v", count=True, help="-v info, -vv debug"),
         as_json: bool = typer.Option(False, "--json", help="Machine-readable verdict."),
         cap: Optional[List[str]] = typer.Option(None, "--cap", help="Resource cap override key=value."),
         kernel_data: str = typer.Option("conform", "--kernel-data", help="conform or exact.")):
    console = Console()
    try:
        config = load_config(cap or [], kernel_data=kernel_data, log_level=verbosity_level(verbose))
    except ConfigError as e:
        emit(Verdict("config", Answer.ERROR, diagnostics=[str(e)]), as_json, console)
        raise typer.Exit(3)
    setup_logging(config.log_level)
    ctx.obj = State(config, as_json, console)


# ----- Commands on files ------

@app.command("validate")
def cmd_validate(ctx: typer.Context,
                 doc: Path = typer.Argument(..., help="Tree in term syntax."),
                 grammar: Path = typer.Argument(..., help="Grammar file.")):
    """Is the document valid for the grammar?"""
    state = _state(ctx)

    def compute() -> Verdict:
        notes: List[str] = []
        g = _grammar(grammar, state, notes)
        t = parse_tree(_read(doc), str(doc))
        if validate(t, g):
            return Verdict("validate", Answer.YES, notes=notes)
        where = first_violation(t, g)
        return Verdict("validate", Answer.NO, notes=notes,
                       diagnostics=[f"first violation at {path_text(where)}"])

    _finish(state, "validate", compute)


def _bottom_up(state: State, kernel: Path, typings: Sequence[Path],
               kind: GrammarClass, mechanism: Optional[Mechanism], notes: List[str]) -> BottomUpDesign:
    k = _kernel(kernel)
    typing = [_grammar(p, state, notes) for p in typings]
    return BottomUpDesign(k, tuple(typing), kind, mechanism)


@app.command("cons")
def cmd_cons(ctx: typer.Context,
             kernel: Path = typer.Argument(..., help="Kernel file."),
             typings: List[Path] = typer.Argument(None, help="One grammar file per function, in order."),
             kind: GrammarClass = typer.Option(GrammarClass.EDTD, "--class"),
             mechanism: Optional[Mechanism] = typer.Option(None, "--mechanism")):
    """Is the set of extensions a language of the class?"""
    state = _state(ctx)

    def compute() -> Verdict:
        notes: List[str] = []
        d = _bottom_up(state, kernel, typings or [], kind, mechanism, notes)
        if cons(d, state.config.caps):
            return Verdict("cons", Answer.YES, notes=notes)
        return Verdict("cons", Answer.NO, notes=notes,
                       diagnostics=[f"the extensions are not a {kind.value} language"])

    _finish(state, "cons", compute)


@app.command("synth")
def cmd_synth(ctx: typer.Context,
              kernel: Path = typer.Argument(..., help="Kernel file."),
              typings: List[Path] = typer.Argument(None, help="One grammar file per function, in order."),
              kind: GrammarClass = typer.Option(GrammarClass.EDTD, "--class"),
              mechanism: Optional[Mechanism] = typer.Option(None, "--mechanism"),
              out: Optional[Path] = typer.Option(None, "--out", help="Write the global type here.")):
    """The global type of a bottom-up design."""
    state = _state(ctx)

    def compute() -> Verdict:
        notes: List[str] = []
        d = _bottom_up(state, kernel, typings or [], kind, mechanism, notes)
        g = synthesize_type(d, state.config.caps)
        if g is None:
            return Verdict("synth", Answer.NO, notes=notes,
                           diagnostics=[f"the extensions are not a {kind.value} language"])
        text = dump_grammar(g)
        written = []
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
            written.append(str(out))
        return Verdict("synth", Answer.YES, witness={"type": text}, notes=notes, written=written)

    _finish(state, "synth", compute)


def _local_diagnostics(state: State, d: tt.TreeDesign, typing: Sequence[TreeGrammar]) -> List[str]:
    fixed = tt.anchors(d, state.config.kernel_data)
    t = build_t_tau(d.kernel, typing, Mechanism.NFA, fixed or None, d.target if fixed else None)
    tree = grammar_counterexample(t, d.target)
    return [] if tree is None else [f"trees differ on {tree_text(tree)}"]


@app.command("check")
def cmd_check(ctx: typer.Context,
              target: Optional[Path] = typer.Option(None, "--target", help="Global type."),
              kernel: Optional[Path] = typer.Option(None, "--kernel", help="Kernel document."),
              design: Optional[Path] = typer.Option(None, "--design", help="Directory with target, kernel, typings."),
              typing: Optional[List[str]] = typer.Option(None, "--typing", help="f=grammar-file, once per function."),
              prop: tt.Property = typer.Option(tt.Property.LOC, "--property"),
              kind: Optional[GrammarClass] = typer.Option(None, "--class", help="Read the target in this class.")):
    """Is the given typing local / maximal local / perfect?"""
    state = _state(ctx)
    problem = f"check {prop.value}"

    def compute() -> Verdict:
        notes: List[str] = []
        d = _tree_design(state, target, kernel, design, kind, notes)
        types = [_grammar(p, state, notes) for p in _typing_files(d, typing or [], design)]
        ok = tt.check_typing(d, prop, types, state.config.caps, state.config.kernel_data)
        if ok:
            return Verdict(problem, Answer.YES, notes=notes)
        diagnostics = []
        if not tt.global_check(d, types, state.config.caps, state.config.kernel_data):
            diagnostics = ["typing is not local"] + _local_diagnostics(state, d, types)
        return Verdict(problem, Answer.NO, notes=notes, diagnostics=diagnostics)

    _finish(state, problem, compute)


def _perfect_diagnostics(state: State, d: tt.TreeDesign) -> List[str]:
    found = tt.explain_no_perfect(d, state.config.caps, state.config.kernel_data)
    if found is None:
        return []
    lines = [f"node {path_text(found.path)} has no perfect typing"]
    if found.candidate is not None:
        lines.append("candidate (Ω): " + ", ".join(_nfa_text(a) for a in found.candidate))
    if found.counterexample is not None:
        kind, w = found.counterexample
        lines.append(f"candidate is {kind} on {_word_text(w)}")
    return lines


@app.command("find")
def cmd_find(ctx: typer.Context,
             target: Optional[Path] = typer.Option(None, "--target", help="Global type."),
             kernel: Optional[Path] = typer.Option(None, "--kernel", help="Kernel document."),
             design: Optional[Path] = typer.Option(None, "--design", help="Directory with target and kernel."),
             prop: tt.Property = typer.Option(tt.Property.LOC, "--property"),
             kind: Optional[GrammarClass] = typer.Option(None, "--class", help="Read the target in this class."),
             all_ml: bool = typer.Option(False, "--all", help="List every maximal local typing."),
             out_dir: Optional[Path] = typer.Option(None, "--out-dir", help="Write witness grammars here.")):
    """Find a local / maximal local / perfect typing."""
    state = _state(ctx)
    problem = "find all ml" if all_ml else f"find {prop.value}"

    def compute() -> Verdict:
        notes: List[str] = []
        d = _tree_design(state, target, kernel, design, kind, notes)
        caps, mode = state.config.caps, state.config.kernel_data
        if all_ml:
            found = tt.all_maximal_local(d, caps, mode)
            witness = {}
            for i, typing in enumerate(found, 1):
                witness.update({f"{i}{name}": text for name, text in _witness(d.kernel.functions, typing).items()})
            answer = Answer.YES if found else Answer.NO
            files = {f"{name.replace('@', '_')}.grammar": text for name, text in witness.items()}
            return Verdict(problem, answer, witness=witness, notes=notes, written=_write(out_dir, files))
        if prop is tt.Property.PERF and d.kind is GrammarClass.EDTD:
            notes.append(PERFECT_BOX_NOTE)
        typing = tt.exists_typing(d, prop, caps, mode)
        if typing is None:
            diagnostics = _perfect_diagnostics(state, d) if prop is tt.Property.PERF else []
            return Verdict(problem, Answer.NO, notes=notes, diagnostics=diagnostics)
        witness = _witness(d.kernel.functions, typing)
        files = {f"{function_name(name)}.grammar": text for name, text in witness.items()}
        return Verdict(problem, Answer.YES, witness=witness, notes=notes, written=_write(out_dir, files))

    _finish(state, problem, compute)


# ----- Word designs ------

def _word_design(target: str, kernel: str, chars: bool, box: bool) -> wt.WordDesign:
    a = rx.to_nfa(rx.parse_regex(target, char_symbols=chars))
    k = wt.KernelBox.parse(kernel) if box else wt.KernelWord.parse(kernel, char_symbols=chars)
    return wt.WordDesign(a, k)


def _word_witness(functions: Sequence[str], typing: Sequence[fa.Nfa], chars: bool) -> Dict[str, str]:
    return {f"@{f}": _nfa_text(a, chars) for f, a in zip(functions, typing)}


@word_app.command("check")
def word_check(ctx: typer.Context,
               target: str = typer.Option(..., "--target", help="Target regex."),
               kernel: str = typer.Option(..., "--kernel", help="Kernel word, e.g. 'a @f1 c @f2 e'."),
               typing: Optional[List[str]] = typer.Option(None, "--typing", help="f=regex, once per function."),
               prop: tt.Property = typer.Option(tt.Property.LOC, "--property"),
               chars: bool = typer.Option(False, "--chars", help="Every letter is a symbol."),
               box: bool = typer.Option(False, "--box", help="Kernel is a box kernel.")):
    """Is the given word typing local / maximal local / perfect?"""
    state = _state(ctx)
    problem = f"word check {prop.value}"

    def compute() -> Verdict:
        d = _word_design(target, kernel, chars, box)
        texts = _ordered(d.kernel.functions, _bindings(typing or []))
        types = [rx.to_nfa(rx.parse_regex(t, char_symbols=chars)) for t in texts]
        notes = [PERFECT_BOX_NOTE] if box and prop is tt.Property.PERF else []
        if prop is tt.Property.LOC:
            ok = wt.check_local(d, types)
        elif prop is tt.Property.ML:
            ok = wt.check_maximal_local(d, types)
        else:
            ok = wt.check_perfect(d, types)
        if ok:
            return Verdict(problem, Answer.YES, notes=notes)
        diagnostics = []
        problem_word = wt.local_counterexample(d, types)
        if problem_word is not None:
            kind, w = problem_word
            diagnostics.append(f"typing is {kind} on {_word_text(w, chars)}")
        return Verdict(problem, Answer.NO, notes=notes, diagnostics=diagnostics)

    _finish(state, problem, compute)


@word_app.command("find")
def word_find(ctx: typer.Context,
              target: str = typer.Option(..., "--target", help="Target regex."),
              kernel: str = typer.Option(..., "--kernel", help="Kernel word, e.g. 'a @f1 c @f2 e'."),
              prop: tt.Property = typer.Option(tt.Property.LOC, "--property"),
              all_ml: bool = typer.Option(False, "--all", help="List every maximal local typing."),
              chars: bool = typer.Option(False, "--chars", help="Every letter is a symbol."),
              box: bool = typer.Option(False, "--box", help="Kernel is a box kernel.")):
    """Find a local / maximal local / perfect word typing."""
    state = _state(ctx)
    problem = "word find all ml" if all_ml else f"word find {prop.value}"

    def compute() -> Verdict:
        d = _word_design(target, kernel, chars, box)
        caps = state.config.caps
        if all_ml:
            found = wt.all_maximal_local(d, caps)
            witness = {}
            for i, typing in enumerate(found, 1):
                witness.update({f"{i}{name}": text for name, text in _word_witness(d.kernel.functions, typing, chars).items()})
            return Verdict(problem, Answer.YES if found else Answer.NO, witness=witness)
        notes = [PERFECT_BOX_NOTE] if box and prop is tt.Property.PERF else []
        if prop is tt.Property.LOC:
            typing = wt.exists_local(d, caps)
        elif prop is tt.Property.ML:
            typing = wt.exists_ml(d, caps)
        else:
            typing = wt.exists_perfect(d)
        if typing is not None:
            return Verdict(problem, Answer.YES, witness=_word_witness(d.kernel.functions, typing, chars),
                           notes=notes)
        diagnostics = []
        p = wt.build_perfect(d.target, d.kernel)
        if not p.compatible:
            diagnostics.append("design is not compatible: no extension lies in the target")
        elif prop is tt.Property.PERF:
            omega = wt.omega_typing(p)
            diagnostics.append("candidate (Ω): " + ", ".join(_nfa_text(a, chars) for a in omega))
            kind, w = wt.local_counterexample(d, omega)
            diagnostics.append(f"candidate is {kind} on {_word_text(w, chars)}")
        return Verdict(problem, Answer.NO, diagnostics=diagnostics, notes=notes)

    _finish(state, problem, compute)
