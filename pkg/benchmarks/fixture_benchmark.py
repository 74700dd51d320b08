#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import numpy

# Import src

from netmigrate import *
from netmigrate.check import CheckContext
from netmigrate.traversal import policy_probe

if __name__ == "__main__":
    # Load the motivating example and print its policies
    topology, policy_set = fixture_motivating_example()
    print("Policies of the motivating example:")
    print(render_policy_set(policy_set, topology))
    # Run the check battery on the first segment of every policy probe, with its timing
    print("Check results:")
    for policy in policy_set:
        probe = policy_probe(policy, topology)
        traversal: Traversal = simulate(topology, probe.inject_at, probe.header)
        segment = traversal.segments()[0]
        context: CheckContext = CheckContext(topology, policy_set, policy, segment, traversal)
        eligible_battery: dict = check_eligibility_all_battery(context, POLICY_BATTERY)
        results = run_all_battery(context, eligible_battery, False)
        for result, elapsed_time in results:
            if result.passed:
                print("- PASSED - " + policy.id + " - " + result.name + " - elapsed time: " + str(numpy.round(elapsed_time, 3)) + " ms")
            else:
                print("- FAILED - " + policy.id + " - " + result.name + " - elapsed time: " + str(numpy.round(elapsed_time, 3)) + " ms")
    # Compare the naive relocation of u1 and v1 with the planned extension
    hosts: list = ["u1", "v1"]
    naive: ExtensionPlan = naive_plan(topology, hosts, "DC", policy_set)
    planned: ExtensionPlan = plan_extension(topology, policy_set, hosts, "DC")
    reports: list = []
    for plan in (naive, planned):
        extended: Topology = apply_plan(topology, plan)
        reports.append(check_all(extended, map_policy_set(policy_set, plan), plan_equivalents(topology, extended, plan)))
    print("Planned extension:")
    print(planned.dumps())
    print("Naive relocation against planned extension:")
    print(compare_reports(reports[0], reports[1]).to_text())
