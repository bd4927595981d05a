// Umbrella header.
#pragma once

#include "sdsn/adadelta.hpp"
#include "sdsn/binio.hpp"
#include "sdsn/checkpoint.hpp"
#include "sdsn/datasets.hpp"
#include "sdsn/embeddings.hpp"
#include "sdsn/losses.hpp"
#include "sdsn/metrics.hpp"
#include "sdsn/model.hpp"
#include "sdsn/pair_features.hpp"
#include "sdsn/pipeline.hpp"
#include "sdsn/scorer.hpp"
#include "sdsn/sparse_space.hpp"
#include "sdsn/train.hpp"
#include "sdsn/util.hpp"
