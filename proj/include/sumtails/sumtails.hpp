#pragma once

#include "sumtails/errors.hpp"
#include "sumtails/special_functions.hpp"
#include "sumtails/quadrature.hpp"
#include "sumtails/term_distributions.hpp"
#include "sumtails/tail_asymptotics.hpp"
#include "sumtails/charfun_inversion.hpp"
#include "sumtails/montecarlo_oracle.hpp"
#include "sumtails/acceptance.hpp"
#include "sumtails/reporting.hpp"
