"""Sum-rate bounds and capacity tools for interference networks with general message sets."""

from .model import MessageLabel, NetworkSpec, SpecError, msg, parse_network_spec, serialize_network_spec

__all__ = ["MessageLabel", "NetworkSpec", "SpecError", "msg", "parse_network_spec", "serialize_network_spec"]
