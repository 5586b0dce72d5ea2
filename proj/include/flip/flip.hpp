#pragma once

#include "flip/error.hpp"
#include "flip/linalg.hpp"
#include "flip/hermitian_core.hpp"
#include "flip/moment_quotient.hpp"
#include "flip/spherical_blowup.hpp"
#include "flip/perturbation_matching.hpp"
#include "flip/sampling.hpp"
