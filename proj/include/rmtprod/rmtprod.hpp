#pragma once

#include "dyson.hpp"
#include "random.hpp"
#include "dense.hpp"
#include "ensembles.hpp"
#include "chain.hpp"
#include "spectra.hpp"
#include "special.hpp"
#include "weights.hpp"
#include "finite_beta2.hpp"
#include "beta4.hpp"
#include "macro.hpp"
#include "montecarlo.hpp"
#include "io.hpp"
#include "verify.hpp"
