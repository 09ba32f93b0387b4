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
from sorptrack import particles
from sorptrack import kernels
from sorptrack import sites
from sorptrack import engine
from sorptrack import isotherms
from sorptrack import experiments

from sorptrack.particles import SimConfig, Homogeneous, Heterogeneous, ConfigError
from sorptrack.particles import ParticleState, TimeSeriesRecord, initialize_state, equilibrium_average
from sorptrack.kernels import BandwidthRule, bandwidth, p_forward
from sorptrack.sites import FreundlichSiteLaw, kmin_from_deviation, critical_concentration
from sorptrack.engine import step, run
from sorptrack.isotherms import langmuir, freundlich, combined_isotherm, relative_deviation
from sorptrack.isotherms import Langmuir, Freundlich, Combined, fit_loglog, fit_langmuir
from sorptrack.experiments import SweepSpec, run_sweep, load_experiment

__version__ = '0.1.0'
