#pragma once

// Everything at once; individual headers are usable on their own.
#include "aftershock/correlation.hpp"
#include "aftershock/diagnostics.hpp"
#include "aftershock/error.hpp"
#include "aftershock/events.hpp"
#include "aftershock/ingest.hpp"
#include "aftershock/io.hpp"
#include "aftershock/omori.hpp"
#include "aftershock/pipeline.hpp"
#include "aftershock/report.hpp"
#include "aftershock/rng.hpp"
#include "aftershock/stats.hpp"
#include "aftershock/synth.hpp"
#include "aftershock/waiting.hpp"
