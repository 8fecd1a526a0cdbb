"""Cut-sketch lower-bound gadgets and a local-query min-cut estimator, checked at desk scale."""

__version__ = "0.1.0"
