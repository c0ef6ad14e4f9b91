#ifndef QNNF_DATA_HPP
#define QNNF_DATA_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qnnf::data {

struct TimeSeries {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;   // parallel to column_names
    std::vector<std::string> timestamps;        // empty when no timestamp column was asked for
    std::string source;
    int dropped_rows = 0;

    std::size_t length() const { return columns.empty() ? 0 : columns.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
};

// CSV with a header row; rows whose target or feature cell does not parse as
// a number are dropped and counted. Chronological order is kept as stored.
TimeSeries load_series(const std::string& path, const std::string& target_column,
                       const std::vector<std::string>& feature_columns = {},
                       const std::string& timestamp_column = "", char delimiter = ',');

// Half-open index range [begin, end) into a series.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct NormStats {
    std::map<std::string, std::pair<double, double>> ranges;  // column -> (min, max)

    bool has(const std::string& column) const { return ranges.count(column) > 0; }
    std::pair<double, double> range(const std::string& column) const;
};

// Fit on the training range only; feeding any test index here is the caller's
// leak. Constant columns are rejected.
NormStats minmax_fit(const TimeSeries& series, const std::vector<std::string>& columns,
                     IndexRange fit_range);

// x -> (x - min) / (max - min) on every column the stats cover.
TimeSeries minmax_apply(const TimeSeries& series, const NormStats& stats);

double minmax_invert_one(double value, const NormStats& stats, const std::string& column);
std::vector<double> minmax_invert(std::span<const double> values, const NormStats& stats,
                                  const std::string& column);
double minmax_apply_one(double value, const NormStats& stats, const std::string& column);

// Supervised one-step pairs: sample t carries the feature columns at index t
// and the target at t + shift as its label.
struct WindowedDataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> labels;
    std::vector<std::string> feature_names;
    std::string target_name;

    std::size_t size() const { return labels.size(); }
};

WindowedDataset make_supervised(const TimeSeries& normalized, const std::string& target,
                                const std::vector<std::string>& features, int shift = 1);

struct SplitSpec {
    enum class Kind { Ratio, Boundary };
    Kind kind = Kind::Ratio;
    double ratio = 0.8;
    std::size_t boundary = 0;

    static SplitSpec by_ratio(double r) { return {Kind::Ratio, r, 0}; }
    static SplitSpec at_boundary(std::size_t b) { return {Kind::Boundary, 0.0, b}; }
    static SplitSpec parse(const std::string& text);  // "ratio:0.8" or "boundary:1825"
};

// Train strictly precedes test; no shuffling across the boundary.
std::pair<WindowedDataset, WindowedDataset> chronological_split(const WindowedDataset& dataset,
                                                                const SplitSpec& split);

// Seeded Gaussian noise on the feature values only; labels untouched.
WindowedDataset inject_noise(const WindowedDataset& dataset, double sigma, std::uint64_t seed);

// The full ingestion path: fit stats on the training prefix of the series,
// normalize, window, split. The boundary in the split refers to sample
// indices for Ratio and to series indices for Boundary (so a daily six-year
// series splits at 5*365).
struct PreparedData {
    WindowedDataset train, test;
    NormStats stats;
    std::string target;
    std::vector<double> raw_target;  // full raw target column, chronological
};

PreparedData prepare_dataset(const TimeSeries& series, const std::string& target,
                             const std::vector<std::string>& features, const SplitSpec& split,
                             int shift = 1);

std::string dataset_csv(const WindowedDataset& dataset);  // for inspection dumps

}  // namespace qnnf::data

#endif
