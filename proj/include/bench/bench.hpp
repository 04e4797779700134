#ifndef BENCH_BENCH_HPP
#define BENCH_BENCH_HPP

#include "comparison/comparison.hpp"
#include "datastore/checkpoint.hpp"
#include "datastore/csv.hpp"
#include "datastore/dataset.hpp"
#include "datastore/matrix.hpp"
#include "datastore/prediction_record.hpp"
#include "datastore/split.hpp"
#include "error.hpp"
#include "estimation/estimation.hpp"
#include "io.hpp"
#include "learners/hyperparameters.hpp"
#include "learners/models.hpp"
#include "learners/registry.hpp"
#include "learners/standardize.hpp"
#include "learners/tuning.hpp"
#include "metrics/metrics.hpp"
#include "orchestrator/orchestrator.hpp"
#include "orchestrator/synth.hpp"
#include "random.hpp"
#include "report/cd_diagram.hpp"
#include "report/report.hpp"
#include "special_functions.hpp"

#endif // BENCH_BENCH_HPP
