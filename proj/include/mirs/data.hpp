#ifndef MIRS_DATA_HPP
#define MIRS_DATA_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mirs {

enum class Source : std::uint8_t { Probability, Convenience };

// Case-level rectangular dataset.  y[i] is meaningful only where
// y_observed[i] is true; estimators must never read masked entries without
// an imputation step in between.  case_id packs (original row << 32) | dup
// so imputation draws can be consumed in a storage-order-independent order.
struct DataMatrix {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<std::int8_t> y;
  std::vector<std::uint8_t> y_observed;
  std::vector<Source> source;
  std::vector<double> p_s;
  std::vector<std::uint64_t> case_id;

  std::size_t n() const { return x1.size(); }
  std::size_t n_missing() const;
  bool all_observed() const { return n_missing() == 0; }

  // Throws InputError when column lengths disagree or p_s leaves (0, 1].
  void validate() const;

  // The y column, available only when nothing is masked; throws
  // EstimateError otherwise.  Guards estimators that skip imputation.
  std::vector<double> complete_y() const;

  void reserve(std::size_t cap);
  void push_row(double x1v, double x2v, std::int8_t yv, bool observed,
                Source src, double ps, std::uint64_t id);
};

// Column-wise equality; masked y entries are not compared.
bool same_data(const DataMatrix& a, const DataMatrix& b);

// CSV schema: header "x1,x2,y,source,p_s", source in {prob, conv},
// y in {0, 1, <empty>}; an empty y field marks a masked value.
DataMatrix read_csv(const std::string& path);
void write_csv(const DataMatrix& data, const std::string& path);

// A dataset with the masked outcomes filled in by one imputation pass.
struct CompletedDataset {
  std::shared_ptr<const DataMatrix> base;
  std::vector<std::int8_t> y_filled;
};

}  // namespace mirs

#endif  // MIRS_DATA_HPP
