#ifndef MIRS_RESAMPLE_HPP
#define MIRS_RESAMPLE_HPP

#include <cstdint>
#include <vector>

#include "mirs/data.hpp"
#include "mirs/rng.hpp"

namespace mirs {

enum class PlanKind { JackknifeDeleteGroup, Bootstrap };

// An indexed family of replicate row-index multisets.  Jackknife replicates
// store the RETAINED indices of each group's complement; bootstrap
// replicates store the n sampled indices.  Indices are kept sorted so that
// materialized rows follow stable (original row, duplicate) order.
struct ReplicatePlan {
  PlanKind kind{PlanKind::JackknifeDeleteGroup};
  std::size_t n{0};
  std::vector<std::vector<std::uint32_t>> replicates;

  int count() const { return static_cast<int>(replicates.size()); }
};

// Randomly permutes rows and deals them into G groups of size floor(n/G) or
// ceil(n/G); replicate g retains everything outside group g.
ReplicatePlan make_jackknife_plan(std::size_t n, int G, RandomStream& stream);

// B independent with-replacement draws of n row indices each.
ReplicatePlan make_bootstrap_plan(std::size_t n, int B, RandomStream& stream);

// Deleted group g (the complement of the retained indices), sorted.
std::vector<std::uint32_t> deleted_group(const ReplicatePlan& plan, int g);

// Row subset (jackknife) or row multiset (bootstrap, duplicates became
// distinct cases) of data; masks, sources and p_s carry over, case ids pack
// (original row << 32) | duplicate counter.
DataMatrix materialize_replicate(const DataMatrix& data,
                                 const ReplicatePlan& plan, int r);

}  // namespace mirs

#endif  // MIRS_RESAMPLE_HPP
