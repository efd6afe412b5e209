#pragma once

#include "pmedian/error.hpp"
#include "pmedian/factor.hpp"
#include "pmedian/frechet.hpp"
#include "pmedian/linalg.hpp"
#include "pmedian/product.hpp"
#include "pmedian/random.hpp"
#include "pmedian/robustness.hpp"
#include "pmedian/solvers.hpp"
#include "pmedian/version.hpp"
