#pragma once

#include "santree/tree.hpp"
#include "santree/demand.hpp"
#include "santree/offline_opt.hpp"
#include "santree/quasi_opt.hpp"
#include "santree/online.hpp"
#include "santree/workloads.hpp"
#include "santree/harness.hpp"
