#pragma once

#include "fjlp/bench.hpp"
#include "fjlp/embed.hpp"
#include "fjlp/error.hpp"
#include "fjlp/fourwise.hpp"
#include "fjlp/gf2m.hpp"
#include "fjlp/io.hpp"
#include "fjlp/lowerbound.hpp"
#include "fjlp/random.hpp"
#include "fjlp/report.hpp"
#include "fjlp/stats.hpp"
#include "fjlp/verify.hpp"
#include "fjlp/wht.hpp"
