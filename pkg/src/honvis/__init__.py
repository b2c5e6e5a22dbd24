"""Higher-order network analytics workbench.

Builds first-order and variable-order (higher-order) network representations
from raw trajectory data, computes dependency/ranking/propagation analytics on
them, and serves the results over an HTTP API consumed by an interactive
explorer.
"""

__version__ = "0.1.0"
