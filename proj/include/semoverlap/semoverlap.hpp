#pragma once

#include "semoverlap/analysis.hpp"
#include "semoverlap/decoding.hpp"
#include "semoverlap/embeddings.hpp"
#include "semoverlap/error.hpp"
#include "semoverlap/labeling.hpp"
#include "semoverlap/metrics.hpp"
#include "semoverlap/overlap.hpp"
#include "semoverlap/stopwords.hpp"
#include "semoverlap/textproc.hpp"
#include "semoverlap/transport.hpp"
