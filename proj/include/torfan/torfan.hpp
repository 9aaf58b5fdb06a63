#pragma once

#include "torfan/blowup.hpp"
#include "torfan/catalog.hpp"
#include "torfan/cli.hpp"
#include "torfan/coeff.hpp"
#include "torfan/error.hpp"
#include "torfan/fan.hpp"
#include "torfan/fgl.hpp"
#include "torfan/intmat.hpp"
#include "torfan/json_io.hpp"
#include "torfan/numeric.hpp"
#include "torfan/piecewise.hpp"
#include "torfan/random.hpp"
#include "torfan/series.hpp"
#include "torfan/sr.hpp"
