from typing import Dict, List, Sequence

import sympy

from app.exactnum.cyclotomic import CycNum, CyclotomicField
from app.exactnum.linalg import Eliminator
from app.utils.errors import ConfigError
from app.utils.logger import logger

ModRow = Dict[int, int]


def choose_primes(n: int, count: int = 2, start: int = 2 ** 31) -> List[int]:
    """The largest primes p < start with p = 1 mod n."""
    out: List[int] = []
    p = start - 1
    p -= (p - 1) % n
    while len(out) < count:
        if sympy.isprime(p):
            out.append(p)
        p -= n
    return out


class ModularEliminator:
    """Sparse incremental elimination over F_p with eps sent to a root of unity mod p."""

    def __init__(self, field: CyclotomicField, prime: int):
        if (prime - 1) % field.n:
            raise ConfigError(f"Prime {prime} is not 1 mod {field.n}")
        self.field = field
        self.prime = prime
        self.omega = field.primitive_root_mod(prime)
        self.pivots: Dict[int, ModRow] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def image(self, row: Dict[int, CycNum]) -> ModRow:
        p = self.prime
        out = {}
        for c, v in row.items():
            x = v.mod_image(p, self.omega)
            if x:
                out[c] = x
        return out

    def add(self, row: Dict[int, CycNum]) -> bool:
        p = self.prime
        work = self.image(row)
        while True:
            hits = [c for c in work if c in self.pivots]
            if not hits:
                break
            col = min(hits)
            factor = work[col]
            for c, v in self.pivots[col].items():
                value = (work.get(c, 0) - factor * v) % p
                if value:
                    work[c] = value
                else:
                    work.pop(c, None)
        if not work:
            return False
        lead = min(work)
        inv = pow(work[lead], -1, p)
        self.pivots[lead] = {c: v * inv % p for c, v in work.items()}
        return True


def modular_ranks(field: CyclotomicField, rows: Sequence[Dict[int, CycNum]], primes: Sequence[int] = (),
                  ncols: int = None) -> List[int]:
    """Rank of the image over F_p for every prime; each is a lower bound for the exact rank."""
    ranks = []
    for prime in primes or choose_primes(field.n):
        elim = ModularEliminator(field, prime)
        for row in rows:
            elim.add(row)
            if ncols is not None and elim.rank == ncols:
                break
        ranks.append(elim.rank)
    return ranks


def exact_rank(field: CyclotomicField, rows: Sequence[Dict[int, CycNum]], ncols: int = None) -> int:
    elim = Eliminator(field)
    for row in rows:
        elim.add(row)
        if ncols is not None and elim.rank == ncols:
            break
    return elim.rank


def block_rank(field: CyclotomicField, rows: Sequence[Dict[int, CycNum]], method: str = "exact",
               primes: Sequence[int] = (), ncols: int = None) -> int:
    """Rank of a sparse matrix.

    The modular method trusts the primes only when they agree; otherwise the
    exact rank is computed.
    """
    if method == "exact":
        return exact_rank(field, rows, ncols)
    ranks = modular_ranks(field, rows, primes, ncols)
    if len(set(ranks)) > 1:
        logger.warning(f"Modular ranks {ranks} disagree; falling back to exact elimination")
        return exact_rank(field, rows, ncols)
    return ranks[0]
