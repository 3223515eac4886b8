#pragma once

// Single include for the whole toolkit.

#include "ssim/adversary.hpp"
#include "ssim/analysis.hpp"
#include "ssim/engine.hpp"
#include "ssim/errors.hpp"
#include "ssim/io.hpp"
#include "ssim/policy.hpp"
#include "ssim/power.hpp"
#include "ssim/random.hpp"
#include "ssim/scenario.hpp"
#include "ssim/workload.hpp"
