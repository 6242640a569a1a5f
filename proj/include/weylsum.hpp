#pragma once

#include "weylsum/core.hpp"
#include "weylsum/number_theory.hpp"
#include "weylsum/calibration.hpp"
#include "weylsum/precise.hpp"
#include "weylsum/exp_sums.hpp"
#include "weylsum/weyl.hpp"
#include "weylsum/oscillatory.hpp"
#include "weylsum/approx.hpp"
#include "weylsum/diophantine.hpp"
#include "weylsum/extremal.hpp"
#include "weylsum/pde_fractal.hpp"
