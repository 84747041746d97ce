#pragma once

#include "sphanova/basis.hpp"
#include "sphanova/fitter.hpp"
#include "sphanova/index_set.hpp"
#include "sphanova/operators.hpp"
#include "sphanova/orthopoly.hpp"
#include "sphanova/rng.hpp"
#include "sphanova/sensitivity.hpp"
#include "sphanova/sphere.hpp"
#include "sphanova/testfns.hpp"
