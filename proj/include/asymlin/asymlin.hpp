#pragma once

// Exact-arithmetic toolkit for asymmetric normed spaces: polyhedral calculus,
// asymmetric norms and quasi-metrics, precompactness certificates, linear and
// bilinear operator norms, adjoints, and the covering-net constructions for
// compactness transfer.

#include "asymlin/asym_norm.hpp"
#include "asymlin/bilinear_ops.hpp"
#include "asymlin/generate.hpp"
#include "asymlin/instance.hpp"
#include "asymlin/linear_ops.hpp"
#include "asymlin/lp.hpp"
#include "asymlin/polyhedron.hpp"
#include "asymlin/precompact.hpp"
#include "asymlin/suite.hpp"
