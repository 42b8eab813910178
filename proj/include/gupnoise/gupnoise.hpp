#pragma once

// Umbrella header: the full library.

#include "gupnoise/bounds.hpp"
#include "gupnoise/constants.hpp"
#include "gupnoise/error.hpp"
#include "gupnoise/io/cli.hpp"
#include "gupnoise/io/serialize.hpp"
#include "gupnoise/io/tables.hpp"
#include "gupnoise/ligo.hpp"
#include "gupnoise/model.hpp"
#include "gupnoise/oracle/compare.hpp"
#include "gupnoise/oracle/philox.hpp"
#include "gupnoise/oracle/psd.hpp"
#include "gupnoise/oracle/simulate.hpp"
#include "gupnoise/parallel.hpp"
#include "gupnoise/spectra.hpp"
#include "gupnoise/temperature.hpp"
