# __init__.py
"""dxd: typing of distributed XML documents (kernels with docking points)."""
from dxd.bottom_up import BottomUpDesign, build_t_tau, cons, synthesize_type
from dxd.config import AppConfig, Caps, load_caps, load_config
from dxd.document import Extension, KernelDoc, materialize, parse_kernel, validate
from dxd.errors import DxdError
from dxd.schema import GrammarClass, Mechanism, TreeGrammar, dump_grammar, load_grammar
from dxd.tree_typing import Property, TreeDesign, all_maximal_local, check_typing, exists_typing
from dxd.word_typing import KernelBox, KernelWord, WordDesign

__version__ = "0.1.0"

__all__ = [
    "AppConfig", "BottomUpDesign", "Caps", "DxdError", "Extension", "GrammarClass",
    "KernelBox", "KernelDoc", "KernelWord", "Mechanism", "Property", "TreeDesign",
    "TreeGrammar", "WordDesign", "all_maximal_local", "build_t_tau", "check_typing",
    "cons", "dump_grammar", "exists_typing", "load_caps", "load_config", "load_grammar",
    "materialize", "parse_kernel", "synthesize_type", "validate",
]
