#pragma once

#include "nasbench/canonical.hpp"
#include "nasbench/cell_spec.hpp"
#include "nasbench/csv.hpp"
#include "nasbench/digest.hpp"
#include "nasbench/encoding.hpp"
#include "nasbench/enumerator.hpp"
#include "nasbench/errors.hpp"
#include "nasbench/landscape.hpp"
#include "nasbench/netmodel.hpp"
#include "nasbench/oracle.hpp"
#include "nasbench/parallel.hpp"
#include "nasbench/rng.hpp"
#include "nasbench/searchbench.hpp"
#include "nasbench/space_stats.hpp"
#include "nasbench/stats.hpp"
