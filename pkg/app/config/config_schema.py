from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

@dataclass
class ComputeConfig:
    n: int = 2
    level: Fraction = Fraction(1)
    q_order: int = 8
    max_degree: int = 4
    max_pole: Optional[int] = None
    points: List[str] = field(default_factory=lambda: ["2"])
    modules: List[str] = field(default_factory=lambda: ["fund"])
    rank_method: str = "exact"
    primes: List[int] = field(default_factory=list)
    seed: int = 0

    def pole_bound(self) -> int:
        """P_max, defaulting to D_max + 1."""
        return self.max_pole if self.max_pole is not None else self.max_degree + 1

@dataclass
class ToleranceConfig:
    pole: float = 1e-9
    cybe: float = 1e-9
    flatness: float = 1e-8
    transport: float = 1e-10
    transport_atol: float = 1e-12
    degeneration_slope: float = 0.9

@dataclass
class OutputConfig:
    output_path: str = "./output"
    write_csv: bool = False

@dataclass
class LoggingConfig:
    level: str = "INFO"

@dataclass
class AppConfig:
    compute: ComputeConfig = field(default_factory=ComputeConfig)
    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)
