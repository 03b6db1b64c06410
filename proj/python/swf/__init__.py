"""Trojanable CNN inference engine and attack-design toolkit.

Thin wrapper over the C++ core. Tensors are numpy float32 arrays; trojan
configurations travel as JSON strings in the same schema the CLI reads and
writes.
"""

from ._core import (
    SwfError,
    changed_fraction,
    default_order_factor,
    design_trigger,
    fixture_images,
    fixture_weights,
    forward,
    forward_armed,
    layer_output_dims,
    models,
    motivational_pair,
    run_eval,
    run_motiv,
    scenario_layer,
    select_rov,
    untrusted_layers,
)

__all__ = [
    "SwfError",
    "changed_fraction",
    "default_order_factor",
    "design_trigger",
    "fixture_images",
    "fixture_weights",
    "forward",
    "forward_armed",
    "layer_output_dims",
    "models",
    "motivational_pair",
    "run_eval",
    "run_motiv",
    "scenario_layer",
    "select_rov",
    "untrusted_layers",
]
