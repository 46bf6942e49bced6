#pragma once

#include "hsir/classify.hpp"
#include "hsir/dataset_io.hpp"
#include "hsir/error.hpp"
#include "hsir/guided_filter.hpp"
#include "hsir/jacobi.hpp"
#include "hsir/manifold.hpp"
#include "hsir/metrics.hpp"
#include "hsir/pipeline.hpp"
#include "hsir/preprocess.hpp"
#include "hsir/scatter.hpp"
#include "hsir/semisup.hpp"
#include "hsir/synth.hpp"
#include "hsir/trace_ratio.hpp"
#include "hsir/types.hpp"
