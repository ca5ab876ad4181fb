"""Input validation helpers."""
import numpy as np

from .network import Network, validate_network


def check_network(net) -> Network:
    if not isinstance(net, Network):
        raise TypeError(f"expected a Network, got {type(net).__name__}")
    validate_network(net).raise_if_invalid()
    return net


def check_conductances(net: Network, kappa) -> np.ndarray:
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (net.n_edges,):
        raise ValueError(f"expected {net.n_edges} conductances, got shape {kappa.shape}")
    if not np.all(np.isfinite(kappa)) or np.any(kappa < 0):
        raise ValueError("conductances must be finite and nonnegative")
    return kappa


def check_same_topology(net: Network, reference: Network) -> Network:
    if net.n_vertices != reference.n_vertices or net.edges != reference.edges:
        raise ValueError("network topology differs from the fitted one")
    return net
