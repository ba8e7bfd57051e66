#ifndef MINGRAPH_MINGRAPH_HPP
#define MINGRAPH_MINGRAPH_HPP

#include "mingraph/algebra_verifier.hpp"
#include "mingraph/diagnostics.hpp"
#include "mingraph/error.hpp"
#include "mingraph/grassmann.hpp"
#include "mingraph/invariant_suites.hpp"
#include "mingraph/linalg.hpp"
#include "mingraph/measure_tools.hpp"
#include "mingraph/model_zoo.hpp"
#include "mingraph/mss_solver.hpp"
#include "mingraph/parallel.hpp"
#include "mingraph/patch_io.hpp"
#include "mingraph/quadrature.hpp"
#include "mingraph/reports.hpp"

#endif  // MINGRAPH_MINGRAPH_HPP
