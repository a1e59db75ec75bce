#include "mirs/resample.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mirs/errors.hpp"

namespace mirs {

ReplicatePlan make_jackknife_plan(std::size_t n, int G, RandomStream& stream) {
  if (G < 2 || static_cast<std::size_t>(G) > n)
    throw ConfigError("jackknife needs 2 <= G <= n (G=" + std::to_string(G) +
                      ", n=" + std::to_string(n) + ")");
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = stream.uniform_int(i + 1);
    std::swap(perm[i], perm[j]);
  }

  ReplicatePlan plan;
  plan.kind = PlanKind::JackknifeDeleteGroup;
  plan.n = n;
  plan.replicates.resize(G);

  // First n % G groups get the extra row.
  std::vector<std::uint8_t> in_group(n);
  std::size_t pos = 0;
  for (int g = 0; g < G; ++g) {
    const std::size_t size = n / G + (static_cast<std::size_t>(g) < n % G);
    std::fill(in_group.begin(), in_group.end(), 0);
    for (std::size_t i = 0; i < size; ++i) in_group[perm[pos + i]] = 1;
    pos += size;
    auto& retained = plan.replicates[g];
    retained.reserve(n - size);
    for (std::uint32_t i = 0; i < n; ++i)
      if (!in_group[i]) retained.push_back(i);
  }
  return plan;
}

ReplicatePlan make_bootstrap_plan(std::size_t n, int B, RandomStream& stream) {
  if (n < 2) throw ConfigError("bootstrap needs n >= 2");
  if (B < 2) throw ConfigError("bootstrap needs B >= 2");
  ReplicatePlan plan;
  plan.kind = PlanKind::Bootstrap;
  plan.n = n;
  plan.replicates.resize(B);
  std::vector<std::uint32_t> counts(n);
  for (int b = 0; b < B; ++b) {
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::size_t i = 0; i < n; ++i)
      ++counts[stream.uniform_int(n)];
    auto& draw = plan.replicates[b];
    draw.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t c = 0; c < counts[i]; ++c) draw.push_back(i);
  }
  return plan;
}

std::vector<std::uint32_t> deleted_group(const ReplicatePlan& plan, int g) {
  if (plan.kind != PlanKind::JackknifeDeleteGroup)
    throw ConfigError("deleted_group applies to jackknife plans only");
  if (g < 0 || g >= plan.count())
    throw ConfigError("replicate index out of range");
  std::vector<std::uint8_t> retained(plan.n, 0);
  for (std::uint32_t i : plan.replicates[g]) retained[i] = 1;
  std::vector<std::uint32_t> out;
  out.reserve(plan.n - plan.replicates[g].size());
  for (std::uint32_t i = 0; i < plan.n; ++i)
    if (!retained[i]) out.push_back(i);
  return out;
}

DataMatrix materialize_replicate(const DataMatrix& data,
                                 const ReplicatePlan& plan, int r) {
  if (r < 0 || r >= plan.count())
    throw ConfigError("replicate index out of range");
  if (data.n() != plan.n)
    throw ConfigError("plan was built for a different row count");
  const auto& rows = plan.replicates[r];
  DataMatrix out;
  out.reserve(rows.size());
  std::uint32_t dup = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::uint32_t i = rows[k];
    dup = (k > 0 && rows[k - 1] == i) ? dup + 1 : 0;
    out.push_row(data.x1[i], data.x2[i], data.y[i], data.y_observed[i] != 0,
                 data.source[i], data.p_s[i],
                 (static_cast<std::uint64_t>(i) << 32) | dup);
  }
  return out;
}

}  // namespace mirs
