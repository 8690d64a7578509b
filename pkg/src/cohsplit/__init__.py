"""Free Boolean groups, a lazy free-ultrafilter oracle and coherent splitting maps."""

__version__ = "0.1.0"

from .coherent import (  # noqa: E402
    AddGenerator,
    AddUltrafilter,
    CoherentMap,
    Column,
    Condition,
    Hit,
    clopen_certificate,
    coherent_split,
    extend_coherently,
    forcing_split,
    leq,
    meet_dense,
    split_finite_trace,
)
from .estimators import CoherentSplitter, GreedySplitter  # noqa: E402
from .group import OMEGA, GroupElement, Point, TwoValuedMap, hom_eval, star_trace, sym_diff  # noqa: E402
from .oracle import FiniteValuedSequence, OracleState, p_limit  # noqa: E402
from .periodic import PeriodicSet  # noqa: E402
from .splitter import FeedReport, SplitterState  # noqa: E402
