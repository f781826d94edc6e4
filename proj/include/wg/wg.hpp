#pragma once

// Umbrella header for the weak Galerkin mixed Poisson library.

#include "wg/errors.hpp"
#include "wg/geometry.hpp"
#include "wg/mesh.hpp"
#include "wg/mesh_generators.hpp"
#include "wg/mesh_quality.hpp"
#include "wg/mesh_io.hpp"
#include "wg/quadrature.hpp"
#include "wg/basis.hpp"
#include "wg/cell.hpp"
#include "wg/projection.hpp"
#include "wg/dof_layout.hpp"
#include "wg/local_operators.hpp"
#include "wg/assembly.hpp"
#include "wg/solver.hpp"
#include "wg/exact_solutions.hpp"
#include "wg/error_analysis.hpp"
#include "wg/study.hpp"
