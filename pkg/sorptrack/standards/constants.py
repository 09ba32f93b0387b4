"""
   Copyright 2020 The sorptrack developers

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
"""
# species tags
adsorbate = 'A'
free_site = 'B'
adsorbed_complex = 'C'

# site models
homogeneous = 'homogeneous'
heterogeneous = 'heterogeneous'

# bandwidth rules and populations
rule_of_thumb = 'rule_of_thumb'
fixed = 'fixed'
population_adsorbate = 'A'
population_mobile_and_sites = 'AB'

# pair rules of the adsorption sweep
pair_rule_competing = 'competing'
pair_rule_independent = 'independent'

SILVERMAN_PREFACTOR = 1.06

# parameter values of the reference Langmuir experiment (normalized units)
REFERENCE_DOMAIN_LENGTH = 200.0
REFERENCE_DIFFUSION = 1e-2
REFERENCE_DT = 1e-2
REFERENCE_N_STEPS = 2000
REFERENCE_PARTICLE_MASS = 1.0
REFERENCE_CONC_A0 = 200.0
REFERENCE_CONC_B0 = 200.0
REFERENCE_CONC_C0 = 1.0
REFERENCE_KF = 0.5
REFERENCE_KB = 0.1
REFERENCE_EPSILON = 0.1
REFERENCE_WINDOW = 100
REFERENCE_A0_GRID = tuple(float(a) for a in range(40, 251, 10))

# exit codes of the command line interface
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_FAILURE = 3
