#pragma once

#include "mat2gen/b2_model.hpp"
#include "mat2gen/document.hpp"
#include "mat2gen/errors.hpp"
#include "mat2gen/generation.hpp"
#include "mat2gen/invariants.hpp"
#include "mat2gen/linalg.hpp"
#include "mat2gen/mat2.hpp"
#include "mat2gen/polynomial.hpp"
#include "mat2gen/random.hpp"
#include "mat2gen/scalar.hpp"
#include "mat2gen/strata.hpp"
#include "mat2gen/suites.hpp"
