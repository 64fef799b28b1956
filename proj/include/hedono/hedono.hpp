#pragma once

// Umbrella header for the hedono library.

#include "hedono/dates.hpp"
#include "hedono/error.hpp"
#include "hedono/ingest.hpp"
#include "hedono/lexicon.hpp"
#include "hedono/parallel.hpp"
#include "hedono/random.hpp"
#include "hedono/robustness.hpp"
#include "hedono/score.hpp"
#include "hedono/series.hpp"
#include "hedono/shift.hpp"
#include "hedono/shift_graph.hpp"
#include "hedono/tokenize.hpp"
#include "hedono/unicode.hpp"
