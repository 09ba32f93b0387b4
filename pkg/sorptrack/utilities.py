"""
   Copyright 2020 The sorptrack developers

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
"""
import numbers
import numpy as np

__REAL_TYPES__ = (int, float, np.integer, np.floating)


def is_real(value):
    return isinstance(value, __REAL_TYPES__) and not isinstance(value, bool)


def check_finite(name, value, lower=None, strict=False, upper=None):
    """
    Raise a ValueError unless ``value`` is a finite real number within the given bounds.

    Parameters
    ----------
    name : str
        Used in the error message.
    value : float
        The value to check.
    lower : float or None
        Lower bound. Inclusive unless ``strict`` is True.
    strict : bool
        Whether ``lower`` is an exclusive bound.
    upper : float or None
        Inclusive upper bound.

    Returns
    -------
    value : float
    """
    if not is_real(value) or not np.isfinite(value):
        raise ValueError('%s must be a finite real number (got %r).' % (name, value))
    if lower is not None:
        if strict and not value > lower:
            raise ValueError('%s must be greater than %s (got %r).' % (name, lower, value))
        if not strict and not value >= lower:
            raise ValueError('%s must be at least %s (got %r).' % (name, lower, value))
    if upper is not None and not value <= upper:
        raise ValueError('%s must be at most %s (got %r).' % (name, upper, value))
    return float(value)


def check_count(name, value, lower=0):
    if not isinstance(value, numbers.Integral) or isinstance(value, bool):
        raise ValueError('%s must be an integer (got %r).' % (name, value))
    if value < lower:
        raise ValueError('%s must be at least %d (got %r).' % (name, lower, value))
    return int(value)


def wrap_periodic(x, length):
    """
    Map positions into the half-open interval [0, length).
    """
    x = np.mod(x, length)
    # np.mod can round tiny negative values up to ``length``
    x[x >= length] -= length
    return x


def group_by_label(labels, n_groups):
    """
    Counting sort of integer labels.

    Parameters
    ----------
    labels : ndarray
        A 1darray of integers in ``range(n_groups)``.
    n_groups : int

    Returns
    -------
    (order, starts) - a tuple of 1darrays
        ``order[starts[j]:starts[j+1]]`` lists (in increasing order) the indices ``i``
        with ``labels[i] == j``. ``starts`` has length ``n_groups + 1``.
    """
    labels = np.asarray(labels, dtype=int)
    order = np.argsort(labels, kind='stable')
    counts = np.bincount(labels, minlength=n_groups)
    starts = np.concatenate([[0], np.cumsum(counts)]).astype(int)
    return order, starts
