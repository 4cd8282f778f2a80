"""Model checking for safe Petri nets with transits.

The package verifies specifications that mix a linear-time view of the
whole system run with branching-time requirements on the data chains
the transits induce.  The main entry points:

- :func:`check_flow_ctlstar` reduces the full problem to LTL over a
  composed net with inhibitor arcs and solves that.
- :func:`check_ltl` handles plain LTL over the net run.
- :func:`oracle_check` brute-forces bounded lassos as an independent
  second opinion.
- :func:`building_to_pnwt` encodes physical access-control layouts.
"""
from .engine import Verdict, check_flow_ctlstar, check_ltl
from .frontend import (ASSUMPTION_KINDS, TEMPLATE_ARITY, BuildingLayout,
                       Door, LayoutError, PolicyUpdate, assumption_template,
                       building_to_pnwt, dump_layout, parse_layout,
                       property_template)
from .logic import (FormulaError, atoms, is_ctl, negate, nnf, parse_formula,
                    parse_ltl, size, to_text)
from .nets import (CapExceeded, InhibitorNet, LassoFiringSequence,
                   MarkingGraph, NetError, PetriNetWithTransits, Trace,
                   dump_net, enabled, fire, marking_graph, parse_net,
                   replay_lasso, validate_safe)
from .oracle import (OracleResult, OracleUnsupported, chain_graph,
                     enumerate_lassos, eval_ctl_on_chain_graph,
                     eval_ltl_on_lasso, occurrence_name, oracle_check,
                     unfold_tree)

__version__ = "0.1.0"

__all__ = [
    "ASSUMPTION_KINDS",
    "BuildingLayout",
    "CapExceeded",
    "Door",
    "FormulaError",
    "InhibitorNet",
    "LassoFiringSequence",
    "LayoutError",
    "MarkingGraph",
    "NetError",
    "OracleResult",
    "OracleUnsupported",
    "PetriNetWithTransits",
    "PolicyUpdate",
    "TEMPLATE_ARITY",
    "Trace",
    "Verdict",
    "assumption_template",
    "atoms",
    "building_to_pnwt",
    "chain_graph",
    "check_flow_ctlstar",
    "check_ltl",
    "dump_layout",
    "dump_net",
    "enabled",
    "enumerate_lassos",
    "eval_ctl_on_chain_graph",
    "eval_ltl_on_lasso",
    "fire",
    "is_ctl",
    "marking_graph",
    "negate",
    "nnf",
    "occurrence_name",
    "oracle_check",
    "parse_formula",
    "parse_layout",
    "parse_ltl",
    "parse_net",
    "property_template",
    "replay_lasso",
    "size",
    "to_text",
    "unfold_tree",
    "validate_safe",
]
