# config.py
import os
from dataclasses import dataclass, field, fields
from typing import Iterable, Optional

from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException

from dxd.errors import ConfigError

KERNEL_DATA_MODES = ("conform", "exact")


@dataclass
class Caps:
    regex_nodes: int = 10_000          # AST nodes produced by dRE synthesis
    search_vectors: int = 2 ** 20      # subset vectors examined by the word searches
    slot_automata: int = 16            # |Aut(Omega_i)| per slot
    kappa_assignments: int = 2 ** 16   # kappa candidates tried for EDTD designs
    enumeration_length: int = 6        # longest word listed in reports


@dataclass
class AppConfig:
    caps: Caps = field(default_factory=Caps)
    kernel_data: str = "conform"
    log_level: str = "WARNING"


def load_caps(overrides: Optional[Iterable[str]] = None, env: Optional[str] = None) -> Caps:
    """
    Build the resource caps: defaults, then DXD_CAPS, then explicit overrides.
    Both sources are omegaconf dotlists ("search_vectors=4096 slot_automata=8").
    """
    if env is None:
        env = os.environ.get("DXD_CAPS", "")
    dotlist = env.replace(",", " ").split()
    dotlist.extend(overrides or [])
    base = OmegaConf.structured(Caps)
    try:
        merged = OmegaConf.merge(base, OmegaConf.from_dotlist(dotlist))
        return OmegaConf.to_object(merged)
    except OmegaConfBaseException as e:
        raise ConfigError(f"bad cap override {dotlist}: {e}") from e


def load_config(cap_overrides: Optional[Iterable[str]] = None,
                kernel_data: str = "conform",
                log_level: str = "WARNING") -> AppConfig:
    if kernel_data not in KERNEL_DATA_MODES:
        raise ConfigError(f"kernel data mode must be one of {KERNEL_DATA_MODES}, got {kernel_data!r}")
    return AppConfig(caps=load_caps(cap_overrides), kernel_data=kernel_data, log_level=log_level)


def cap_names():
    return [f.name for f in fields(Caps)]
