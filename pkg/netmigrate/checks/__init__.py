#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import scripts

from .check_delivery import DeliveryCheck, segment_delivered
from .check_waypoints import WaypointCheck
from .check_scope import ScopeCheck
from .check_default_deny import DefaultDenyCheck
