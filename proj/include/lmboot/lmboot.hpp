#pragma once

#include "lmboot/analytic_bias.hpp"
#include "lmboot/arfima.hpp"
#include "lmboot/arfit.hpp"
#include "lmboot/estimators.hpp"
#include "lmboot/fracdiff.hpp"
#include "lmboot/rng.hpp"
#include "lmboot/sieve.hpp"
#include "lmboot/simulate.hpp"
