from .mesh import DiskMesh, DiscreteMap, affine_map, polar_disk_mesh, polygon_area, smooth_perturbation
from .energy import Energy, EnergyConfig, assemble_energy, snap_to_cone, triangle_distortion
from .optimize import MinimizeResult, minimize
from .experiments import (MIN_COLUMNS, ElasticReport, MinExperimentReport, all_iterates_above,
                          burkholder_min_experiment, ec_min_experiment, elastic_min_experiment,
                          refinement_study)
