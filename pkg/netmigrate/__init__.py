#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import scripts

from .errors import NetMigrateError, TopologyError, ParseIssue, PolicyParseError, AmbiguousMatchError, ContractError, UnknownNodeError, InfeasibleError, ScenarioError
from .policy import PacketHeader, PacketClass, Relation, OccurrenceConstraint, WaypointSpec, Policy, PolicySet, DEFAULT_DENY, match_packet, occur, check_waypoints, check_scope
from .netmodel import SiteKind, Flexibility, NodeKind, Site, Node, Rule, MiddleboxSpec, ForwardingState, Topology, build_topology, render_topology, validate_topology, node_equiv
from .traversal import Outcome, Traversal, Probe, forward_step, simulate, probe_headers, DEFAULT_HOP_LIMIT
from .dsl import parse_policy_set, render_policy_set
from .fixture import fixture_motivating_example
from .check import Check, Result, Category, Violation, ViolationReport

# Import functions

from .functions import check_policy, check_all, compare_reports, run_all_battery, run_by_name_battery, check_eligibility_all_battery, POLICY_BATTERY, DEFAULT_DENY_BATTERY
from .extend import AddSwitch, Relocate, Mirror, Proxy, Tunnel, RouteFix, ExtensionPlan, Cost, CostModel, apply_plan, relocate_naive, naive_plan, apply_mirror, apply_proxy, verify_homomorphism, map_policy_set, plan_equivalents
from .planner import plan_extension
from .campus import ScenarioConfig, gen_campus
from .evaluation import EvalResult, cmd_eval
