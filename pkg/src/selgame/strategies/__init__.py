"""Strategy constructions, each returning an engine StrategyHandle (or P1 moves)."""

from .basic import *
from .products import *
from .unfolding import *
from .witness_ops import *
from .examples import *
