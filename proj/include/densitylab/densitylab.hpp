#pragma once

#include "densitylab/bit_sequence.hpp"
#include "densitylab/construct.hpp"
#include "densitylab/core.hpp"
#include "densitylab/density.hpp"
#include "densitylab/generic_case.hpp"
#include "densitylab/machine.hpp"
#include "densitylab/permutation.hpp"
#include "densitylab/stochastic.hpp"
#include "densitylab/tokens.hpp"
#include "densitylab/report.hpp"
#include "densitylab/selfcheck.hpp"
#include "densitylab/cli.hpp"
