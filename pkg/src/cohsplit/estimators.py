"""scikit-learn style front ends.

``fit`` learns a splitting map from a family of group elements; ``predict``
returns the class ``f~(a)`` of each element. Both estimators inherit
``get_params``/``set_params`` from :class:`sklearn.base.BaseEstimator`,
so they can be cloned and dropped into grid searches and pipelines.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .coherent import AUTO, clopen_certificate, coherent_split
from .group import hom_eval
from .splitter import SplitterState
from .validation import check_family


class GreedySplitter(ClusterMixin, BaseEstimator):
    """Online greedy splitter; supports ``partial_fit`` for streams.

    Attributes
    ----------
    map_ : TwoValuedMap
        Total map (default 0) built so far.
    reports_ : list of FeedReport
    counts_ : ndarray of shape (2,)
    n_steered_ : int
    labels_ : ndarray
        Class of every element fed so far, in feed order.
    """

    def fit(self, X, y=None):
        self.state_ = SplitterState()
        return self._consume(X)

    def partial_fit(self, X, y=None):
        if not hasattr(self, "state_"):
            self.state_ = SplitterState()
        return self._consume(X)

    def _consume(self, X):
        for a in check_family(X, min_size=0):
            self.state_.feed(a)
        st = self.state_
        self.map_ = st.finalize()
        self.reports_ = st.log
        self.counts_ = np.array([st.count0, st.count1])
        self.n_steered_ = st.steered
        self.labels_ = np.array([r.value for r in st.log], dtype=int)
        return self

    def predict(self, X):
        check_is_fitted(self, "map_")
        return np.array([hom_eval(self.map_, a) for a in check_family(X, distinct=False)],
                        dtype=int)


class CoherentSplitter(ClusterMixin, BaseEstimator):
    """Coherent splitting map of ``X = P x K x (omega+1)``.

    Parameters
    ----------
    cutoff : int or None
        Number of leading elements to process; None means all of them.
    star_mode : {"auto", "finite", "infinite"}
        Which construction to use; "auto" picks the forcing route when the
        prefix has more than ``threshold`` distinct omega-points.
    schedule_length : int or None
        Number of Hit goals on the forcing route (default: half the prefix).
    threshold : int or None
        Auto-mode cut; default ``ceil(sqrt(cutoff))``.
    """

    def __init__(self, cutoff=None, star_mode=AUTO, schedule_length=None, threshold=None):
        self.cutoff = cutoff
        self.star_mode = star_mode
        self.schedule_length = schedule_length
        self.threshold = threshold

    def fit(self, X, y=None):
        family = check_family(X)
        cutoff = len(family) if self.cutoff is None else self.cutoff
        if cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        self.oracles_ = {}
        cert = coherent_split(family, cutoff, self.star_mode, self.oracles_,
                              self.schedule_length, self.threshold)
        self.certificate_ = cert
        self.map_ = cert.map
        self.path_ = cert.path
        self.labels_ = np.array(cert.values, dtype=int)
        return self

    def predict(self, X):
        check_is_fitted(self, "map_")
        return np.array([hom_eval(self.map_, a) for a in check_family(X, distinct=False)],
                        dtype=int)

    def clopen_report(self, X) -> dict:
        """Split ``X`` into the clopen halves of the fitted map."""
        check_is_fitted(self, "map_")
        return clopen_certificate(self.map_, check_family(X, distinct=False))
