#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import packages

import time

# Import src

from netmigrate import *
from netmigrate.campus import scenario_summary

if __name__ == "__main__":
    # Generate a first campus and print its size
    base: ScenarioConfig = ScenarioConfig(seed=7, subnets=3, hosts_per_subnet=2, middlebox_density=0.6)
    topology, policy_set = gen_campus(base)
    print("Campus " + base.scenario_id + ":")
    for name, value in scenario_summary(topology, policy_set).items():
        print("- " + name + ": " + str(value))
    # Sweep the scenarios with a full and with a restricted data center
    for restricted in (False, True):
        config: ScenarioConfig = ScenarioConfig(seed=7, subnets=3, hosts_per_subnet=2, middlebox_density=0.6,
                                                restricted=restricted)
        start: float = time.perf_counter()
        result: EvalResult = cmd_eval(config, 10, workers=2)
        elapsed_time: float = round((time.perf_counter() - start) * 1000, 3)
        print("Evaluation with a " + ("restricted" if restricted else "full") + " data center - elapsed time: " + str(elapsed_time) + " ms")
        print(result.to_text())
