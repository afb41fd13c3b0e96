#pragma once

#include "rational.hpp"
#include "matrix.hpp"
#include "exact_linalg.hpp"
#include "io.hpp"
#include "signed_permutation.hpp"
#include "models.hpp"
#include "face.hpp"
#include "norms.hpp"
#include "lp.hpp"
#include "geometry.hpp"
#include "solvers.hpp"
#include "analysis.hpp"
#include "report.hpp"
#include "svg.hpp"
