#include "qnnf/data.hpp"

#include "qnnf/errors.hpp"
#include "qnnf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qnnf::data {

namespace {

// Splits one CSV record, honoring double quotes ("" escapes a quote).
std::vector<std::string> split_csv_line(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0' && std::isfinite(out);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

const std::vector<double>& TimeSeries::column(const std::string& name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i)
        if (column_names[i] == name) return columns[i];
    throw ConfigError("no such column: " + name);
}

std::pair<double, double> NormStats::range(const std::string& column) const {
    auto it = ranges.find(column);
    if (it == ranges.end()) throw ConfigError("no normalization stats for column: " + column);
    return it->second;
}

TimeSeries load_series(const std::string& path, const std::string& target_column,
                       const std::vector<std::string>& feature_columns,
                       const std::string& timestamp_column, char delimiter) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset: " + path);

    std::string header;
    if (!std::getline(in, header)) throw DataError("empty dataset: " + path);
    std::vector<std::string> names = split_csv_line(header, delimiter);
    for (std::string& n : names) n = trim(n);

    // selected columns: target first, then features not equal to the target
    std::vector<std::string> selected{target_column};
    for (const std::string& f : feature_columns)
        if (f != target_column) selected.push_back(f);

    std::vector<std::size_t> indices;
    for (const std::string& want : selected) {
        auto it = std::find(names.begin(), names.end(), want);
        if (it == names.end()) throw ConfigError("no such column in " + path + ": " + want);
        indices.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    std::ptrdiff_t ts_index = -1;
    if (!timestamp_column.empty()) {
        auto it = std::find(names.begin(), names.end(), timestamp_column);
        if (it == names.end())
            throw ConfigError("no such timestamp column in " + path + ": " + timestamp_column);
        ts_index = it - names.begin();
    }

    TimeSeries series;
    series.column_names = selected;
    series.columns.assign(selected.size(), {});
    series.source = path;

    std::string line;
    std::vector<double> row(selected.size());
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line, delimiter);
        bool ok = true;
        for (std::size_t k = 0; k < indices.size(); ++k) {
            if (indices[k] >= fields.size() || !parse_double(trim(fields[indices[k]]), row[k])) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++series.dropped_rows;
            continue;
        }
        for (std::size_t k = 0; k < row.size(); ++k) series.columns[k].push_back(row[k]);
        if (ts_index >= 0)
            series.timestamps.push_back(
                static_cast<std::size_t>(ts_index) < fields.size() ? trim(fields[ts_index]) : "");
    }
    if (series.length() < 2) throw DataError("fewer than 2 usable rows in " + path);
    return series;
}

NormStats minmax_fit(const TimeSeries& series, const std::vector<std::string>& columns,
                     IndexRange fit_range) {
    if (fit_range.end > series.length() || fit_range.begin >= fit_range.end)
        throw ConfigError("bad fit range");
    NormStats stats;
    for (const std::string& name : columns) {
        const std::vector<double>& col = series.column(name);
        double lo = col[fit_range.begin], hi = col[fit_range.begin];
        for (std::size_t i = fit_range.begin; i < fit_range.end; ++i) {
            lo = std::min(lo, col[i]);
            hi = std::max(hi, col[i]);
        }
        if (!(hi > lo)) throw DataError("constant column cannot be normalized: " + name);
        stats.ranges[name] = {lo, hi};
    }
    return stats;
}

double minmax_apply_one(double value, const NormStats& stats, const std::string& column) {
    auto [lo, hi] = stats.range(column);
    return (value - lo) / (hi - lo);
}

double minmax_invert_one(double value, const NormStats& stats, const std::string& column) {
    auto [lo, hi] = stats.range(column);
    return lo + value * (hi - lo);
}

TimeSeries minmax_apply(const TimeSeries& series, const NormStats& stats) {
    TimeSeries out = series;
    for (std::size_t c = 0; c < out.column_names.size(); ++c) {
        if (!stats.has(out.column_names[c])) continue;
        auto [lo, hi] = stats.range(out.column_names[c]);
        for (double& v : out.columns[c]) v = (v - lo) / (hi - lo);
    }
    return out;
}

std::vector<double> minmax_invert(std::span<const double> values, const NormStats& stats,
                                  const std::string& column) {
    auto [lo, hi] = stats.range(column);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = lo + values[i] * (hi - lo);
    return out;
}

WindowedDataset make_supervised(const TimeSeries& normalized, const std::string& target,
                                const std::vector<std::string>& features, int shift) {
    if (shift < 1) throw ConfigError("shift must be >= 1");
    std::size_t n = normalized.length();
    if (n < static_cast<std::size_t>(shift) + 1)
        throw DataError("series too short for the requested shift");

    std::vector<std::string> feats = features.empty() ? std::vector<std::string>{target}
                                                      : features;
    WindowedDataset ds;
    ds.feature_names = feats;
    ds.target_name = target;
    const std::vector<double>& tcol = normalized.column(target);
    std::vector<const std::vector<double>*> fcols;
    for (const std::string& f : feats) fcols.push_back(&normalized.column(f));

    std::size_t samples = n - static_cast<std::size_t>(shift);
    ds.inputs.reserve(samples);
    ds.labels.reserve(samples);
    for (std::size_t t = 0; t < samples; ++t) {
        std::vector<double> row(fcols.size());
        for (std::size_t k = 0; k < fcols.size(); ++k) row[k] = (*fcols[k])[t];
        ds.inputs.push_back(std::move(row));
        ds.labels.push_back(tcol[t + shift]);
    }
    return ds;
}

SplitSpec SplitSpec::parse(const std::string& text) {
    auto colon = text.find(':');
    std::string kind = text.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "ratio") {
        double r = std::atof(arg.c_str());
        if (!(r > 0.0 && r < 1.0)) throw ConfigError("split ratio must be in (0,1): " + text);
        return by_ratio(r);
    }
    if (kind == "boundary") {
        long b = std::atol(arg.c_str());
        if (b <= 0) throw ConfigError("split boundary must be positive: " + text);
        return at_boundary(static_cast<std::size_t>(b));
    }
    throw ConfigError("split must be ratio:<r> or boundary:<n>, got: " + text);
}

std::pair<WindowedDataset, WindowedDataset> chronological_split(const WindowedDataset& dataset,
                                                                const SplitSpec& split) {
    std::size_t n = dataset.size();
    std::size_t boundary;
    if (split.kind == SplitSpec::Kind::Ratio) {
        if (!(split.ratio > 0.0 && split.ratio < 1.0))
            throw ConfigError("split ratio must be in (0,1)");
        boundary = static_cast<std::size_t>(split.ratio * static_cast<double>(n) + 1e-9);
    } else {
        boundary = split.boundary;
    }
    if (boundary == 0 || boundary >= n)
        throw ConfigError("degenerate split: both sides must be nonempty");

    WindowedDataset train, test;
    train.feature_names = test.feature_names = dataset.feature_names;
    train.target_name = test.target_name = dataset.target_name;
    train.inputs.assign(dataset.inputs.begin(), dataset.inputs.begin() + boundary);
    train.labels.assign(dataset.labels.begin(), dataset.labels.begin() + boundary);
    test.inputs.assign(dataset.inputs.begin() + boundary, dataset.inputs.end());
    test.labels.assign(dataset.labels.begin() + boundary, dataset.labels.end());
    return {std::move(train), std::move(test)};
}

WindowedDataset inject_noise(const WindowedDataset& dataset, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw ConfigError("noise sigma must be >= 0");
    if (sigma == 0.0) return dataset;
    WindowedDataset out = dataset;
    Pcg32 rng(seed);
    for (auto& row : out.inputs)
        for (double& v : row) v += sigma * rng.next_gaussian();
    return out;
}

PreparedData prepare_dataset(const TimeSeries& series, const std::string& target,
                             const std::vector<std::string>& features, const SplitSpec& split,
                             int shift) {
    std::size_t n = series.length();
    std::size_t samples = n - static_cast<std::size_t>(shift);

    std::size_t sample_boundary;
    if (split.kind == SplitSpec::Kind::Ratio) {
        sample_boundary =
            static_cast<std::size_t>(split.ratio * static_cast<double>(samples) + 1e-9);
    } else {
        if (split.boundary < static_cast<std::size_t>(shift) + 1)
            throw ConfigError("split boundary too small");
        sample_boundary = split.boundary - static_cast<std::size_t>(shift);
    }
    if (sample_boundary == 0 || sample_boundary >= samples)
        throw ConfigError("degenerate split: both sides must be nonempty");

    std::vector<std::string> cols = features.empty() ? std::vector<std::string>{target}
                                                     : features;
    if (std::find(cols.begin(), cols.end(), target) == cols.end()) cols.push_back(target);

    // stats touch only series indices the training samples touch
    IndexRange fit{0, sample_boundary + static_cast<std::size_t>(shift)};
    PreparedData out;
    out.stats = minmax_fit(series, cols, fit);
    out.target = target;
    out.raw_target = series.column(target);

    TimeSeries normalized = minmax_apply(series, out.stats);
    WindowedDataset all = make_supervised(normalized, target,
                                          features.empty() ? std::vector<std::string>{target}
                                                           : features,
                                          shift);
    auto [train, test] = chronological_split(all, SplitSpec::at_boundary(sample_boundary));
    out.train = std::move(train);
    out.test = std::move(test);
    return out;
}

std::string dataset_csv(const WindowedDataset& dataset) {
    std::ostringstream out;
    out.precision(17);
    for (const std::string& f : dataset.feature_names) out << f << ",";
    out << "label\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (double v : dataset.inputs[i]) out << v << ",";
        out << dataset.labels[i] << "\n";
    }
    return out.str();
}

}  // namespace qnnf::data
