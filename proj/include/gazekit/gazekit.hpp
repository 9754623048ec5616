#ifndef GAZEKIT_GAZEKIT_HPP
#define GAZEKIT_GAZEKIT_HPP

#include "gazekit/dataset.hpp"
#include "gazekit/eval.hpp"
#include "gazekit/eyes.hpp"
#include "gazekit/feature_io.hpp"
#include "gazekit/features.hpp"
#include "gazekit/image.hpp"
#include "gazekit/model_io.hpp"
#include "gazekit/pipeline.hpp"
#include "gazekit/png_io.hpp"
#include "gazekit/reduction.hpp"
#include "gazekit/regress.hpp"
#include "gazekit/report.hpp"
#include "gazekit/rng.hpp"
#include "gazekit/synth.hpp"
#include "gazekit/tracking.hpp"

#endif
