// Umbrella header.
#pragma once

#include "gapcs/csv.hpp"
#include "gapcs/dct.hpp"
#include "gapcs/errors.hpp"
#include "gapcs/experiments.hpp"
#include "gapcs/image_cs.hpp"
#include "gapcs/matrix_io.hpp"
#include "gapcs/patches.hpp"
#include "gapcs/pgm.hpp"
#include "gapcs/problem.hpp"
#include "gapcs/report_io.hpp"
#include "gapcs/rip.hpp"
#include "gapcs/rng.hpp"
#include "gapcs/sensing_operator.hpp"
#include "gapcs/solver.hpp"
#include "gapcs/svg_plot.hpp"
#include "gapcs/synth.hpp"
#include "gapcs/theory.hpp"
