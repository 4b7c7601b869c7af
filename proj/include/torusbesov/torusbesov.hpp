#pragma once

#include "torusbesov/evolution.hpp"
#include "torusbesov/fft.hpp"
#include "torusbesov/flow.hpp"
#include "torusbesov/harness.hpp"
#include "torusbesov/initial_data.hpp"
#include "torusbesov/littlewood_paley.hpp"
#include "torusbesov/offgrid.hpp"
#include "torusbesov/properties.hpp"
#include "torusbesov/random.hpp"
#include "torusbesov/spectral.hpp"
