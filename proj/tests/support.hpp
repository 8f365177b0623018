#pragma once

// Shared fixtures and independent reference implementations for the tests.

#include "driveml/matrix.hpp"
#include "driveml/rng.hpp"
#include "driveml/table.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace driveml::fixture {

inline std::filesystem::path data_dir() { return DRIVEML_DATA_DIR; }
inline std::filesystem::path heart_csv() { return data_dir() / "heart.csv"; }
inline std::filesystem::path cli_path() { return DRIVEML_CLI_PATH; }

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("driveml_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// O(n^2) pairwise AUC: positive-over-negative wins plus half ties.
inline double pairwise_auc(std::span<const double> s, std::span<const int> y) {
    double wins = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != 0) continue;
            pairs += 1.0;
            if (s[i] > s[j]) wins += 1.0;
            else if (s[i] == s[j]) wins += 0.5;
        }
    }
    return wins / pairs;
}

/// Type-7 quantile straight from the definition: h = (n-1)p, interpolate
/// between the floor(h)-th and next order statistics.
inline double type7(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Days from 1970-01-01 by walking whole years and months.
inline long days_by_counting(int year, int month, int day) {
    auto leap = [](int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
    const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    long d = 0;
    for (int y = 1970; y < year; ++y) d += leap(y) ? 366 : 365;
    for (int y = year; y < 1970; ++y) d -= leap(y) ? 366 : 365;
    for (int m = 1; m < month; ++m) d += mdays[m - 1] + (m == 2 && leap(year) ? 1 : 0);
    return d + day - 1;
}

/// x1, x2 ~ U(0,1), y = 1[x1 + x2 > 1], plus `noise` independent U(0,1) columns.
inline Table sum_threshold_table(std::size_t n, std::uint64_t seed, int noise = 5) {
    Rng rng(seed);
    std::vector<double> x1(n), x2(n), y(n);
    std::vector<std::vector<double>> z(static_cast<std::size_t>(noise), std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = rng.uniform();
        x2[i] = rng.uniform();
        for (auto& col : z) col[i] = rng.uniform();
        y[i] = x1[i] + x2[i] > 1.0 ? 1.0 : 0.0;
    }
    Table t("sum_threshold");
    t.add_column(Column::numeric("x1", x1));
    t.add_column(Column::numeric("x2", x2));
    for (int k = 0; k < noise; ++k) t.add_column(Column::numeric("noise" + std::to_string(k + 1), z[static_cast<std::size_t>(k)]));
    t.add_column(Column::numeric("y", y));
    return t;
}

inline std::vector<int> as_labels(const Column& c) {
    std::vector<int> y(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) y[i] = c.values[i] > 0.5 ? 1 : 0;
    return y;
}

}  // namespace driveml::fixture
