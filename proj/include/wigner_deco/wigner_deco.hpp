#pragma once

#include "errors.hpp"
#include "parallel.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "states.hpp"
#include "wigner.hpp"
#include "smoothing.hpp"
#include "evolution.hpp"
#include "io.hpp"
#include "config.hpp"
