#pragma once

#include "nlap/analysis.hpp"
#include "nlap/constants.hpp"
#include "nlap/errors.hpp"
#include "nlap/iteration.hpp"
#include "nlap/nonlinearity.hpp"
#include "nlap/ode.hpp"
#include "nlap/parallel.hpp"
#include "nlap/quadrature.hpp"
#include "nlap/roots.hpp"
#include "nlap/shooting.hpp"
#include "nlap/transform.hpp"
#include "nlap/version.hpp"
