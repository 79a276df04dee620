#pragma once

#include "transart/metrics/accuracy.hpp"
#include "transart/metrics/diversity.hpp"
#include "transart/metrics/mt_metrics.hpp"
#include "transart/metrics/ttest.hpp"
