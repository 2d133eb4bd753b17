"""
Bratteli Splitting Toolkit - Run Configuration
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from .paths import DEFAULT_PATH_CAP

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """Parameters shared by every subcommand"""
    inputs: List[str] = field(default_factory=list)
    depth: Optional[int] = None
    cap: int = DEFAULT_PATH_CAP
    copies: int = 2
    slack: int = 2
    seed: int = 42
    resolution: int = 2
    samples: int = 8
    out: str = "output"
    verbose: bool = False
    pdf: bool = False
    relation: Optional[str] = None
    plan: Optional[List[int]] = None
    certificate: Optional[str] = None
    mutations: int = 0

    def validate(self) -> "RunConfig":
        """
        Raises:
            ValueError: On the first out-of-range parameter
        """
        if self.depth is not None and self.depth < 1:
            raise ValueError(f"depth must be at least 1, got {self.depth}")
        if self.cap < 1:
            raise ValueError(f"cap must be at least 1, got {self.cap}")
        if self.copies < 0:
            raise ValueError(f"copies must be non-negative, got {self.copies}")
        if self.slack < 0:
            raise ValueError(f"slack must be non-negative, got {self.slack}")
        if self.resolution < 0:
            raise ValueError(f"resolution must be non-negative, got {self.resolution}")
        if self.samples < 0:
            raise ValueError(f"samples must be non-negative, got {self.samples}")
        if self.mutations < 0:
            raise ValueError(f"mutations must be non-negative, got {self.mutations}")
        return self

    def to_dict(self) -> Dict:
        return asdict(self)
