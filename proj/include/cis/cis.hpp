#ifndef CIS_CIS_HPP
#define CIS_CIS_HPP

#include "cis/boundary.hpp"
#include "cis/classifier.hpp"
#include "cis/covgraph.hpp"
#include "cis/dataset.hpp"
#include "cis/error.hpp"
#include "cis/evaluation.hpp"
#include "cis/io.hpp"
#include "cis/parallel.hpp"
#include "cis/pipeline.hpp"
#include "cis/rng.hpp"
#include "cis/screening.hpp"
#include "cis/simgen.hpp"
#include "cis/stats.hpp"
#include "cis/tuning.hpp"

namespace cis {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cis

#endif  // CIS_CIS_HPP
