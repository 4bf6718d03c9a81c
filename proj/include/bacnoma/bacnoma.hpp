#pragma once

#include <bacnoma/audit.hpp>
#include <bacnoma/baseline.hpp>
#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/errors.hpp>
#include <bacnoma/experiments.hpp>
#include <bacnoma/golden_section.hpp>
#include <bacnoma/hybrid.hpp>
#include <bacnoma/instance.hpp>
#include <bacnoma/pure_bac.hpp>
#include <bacnoma/rates.hpp>
#include <bacnoma/solution.hpp>
