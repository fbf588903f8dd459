TWO_CLASS_INI = """
[experiment]
scenario = avg_aoi_vs_N
n_sweep = 10, 20
replications = 2
output_dir = {output_dir}

[network]
num_agents = 10

[class:1]
fraction = 0.5
success_prob = 0.9

[class:2]
fraction = 0.5
success_prob = 0.2

[policy]
kind = threshold_random
thresholds = linear

[simulation]
horizon = 2000
seed = 7
"""

MINIMAL_INI = """
[network]
num_agents = 4

[class:1]
fraction = 0.5
success_prob = 0.9

[class:2]
fraction = 0.5
success_prob = 0.2
"""

BAD_FRACTIONS_INI = """
[network]
num_agents = 10

[class:1]
fraction = 0.5
success_prob = 0.9

[class:2]
fraction = 0.4
success_prob = 0.2
"""

POWER_INI = """
[experiment]
scenario = nonlinear_age
n_sweep = 10
replications = 1
output_dir = {output_dir}

[network]
num_agents = 10

[class:1]
fraction = 0.5
success_prob = 0.9

[class:2]
fraction = 0.5
success_prob = 0.1

[policy]
thresholds = power

[age_function]
kind = power
m = 2

[simulation]
horizon = 3000
"""

CDF_INI = """
[experiment]
scenario = cdf_convergence
n_sweep = 10
output_dir = {output_dir}

[network]
num_agents = 10

[class:1]
fraction = 0.5
success_prob = 0.9

[class:2]
fraction = 0.5
success_prob = 0.2

[simulation]
horizon = 500
snapshot_slots = 100, 500
initial_ages = gaussian
"""
