#pragma once

#include "mdprof/bench.hpp"
#include "mdprof/catalog.hpp"
#include "mdprof/datetime.hpp"
#include "mdprof/engine.hpp"
#include "mdprof/error.hpp"
#include "mdprof/ingest.hpp"
#include "mdprof/json_view.hpp"
#include "mdprof/kg.hpp"
#include "mdprof/metagraph.hpp"
#include "mdprof/profiler.hpp"
#include "mdprof/rdf_model.hpp"
#include "mdprof/rdf_parse.hpp"
#include "mdprof/rdf_write.hpp"
#include "mdprof/shape.hpp"
#include "mdprof/stopwords.hpp"
#include "mdprof/typing.hpp"
